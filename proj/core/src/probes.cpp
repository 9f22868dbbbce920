// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embprobe/probes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "embprobe/error.hpp"
#include "embprobe/metrics.hpp"
#include "embprobe/rng.hpp"

namespace embprobe {

std::string_view ToString(ProbeKind kind) {
  return kind == ProbeKind::kClassification ? "classification" : "regression";
}

std::string_view ToString(Direction direction) {
  return direction == Direction::kHigherBetter ? "higher_better" : "lower_better";
}

const std::vector<ProbeTask> &CanonicalTasks() {
  using K = ProbeKind;
  using D = Direction;
  using T = ProbeTarget;
  static const std::vector<ProbeTask> tasks = {
      {"speaker_id", K::kClassification, T::kSpeakerId, D::kHigherBetter},
      {"gender", K::kClassification, T::kGender, D::kHigherBetter},
      {"char_count", K::kClassification, T::kCharCount, D::kLowerBetter},
      {"recording_condition", K::kClassification, T::kRecordingCondition, D::kLowerBetter},
      {"duration", K::kRegression, T::kDuration, D::kLowerBetter},
      {"snr", K::kRegression, T::kSnr, D::kLowerBetter},
      {"content", K::kRegression, T::kContent, D::kLowerBetter},
      {"f0", K::kRegression, T::kF0, D::kHigherBetter},
  };
  return tasks;
}

const ProbeTask &TaskFor(ProbeTarget target) {
  for (const auto &t : CanonicalTasks())
    if (t.target == target) return t;
  throw Error(ErrorCode::kInvalidArgument, "unknown probe target");
}

std::optional<ProbeTarget> TargetFromName(std::string_view name) {
  for (const auto &t : CanonicalTasks())
    if (t.name == name) return t.target;
  return std::nullopt;
}

Split SplitDataset(std::size_t n, const SplitSpec &spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("train fraction {} outside (0, 1)", spec.train_fraction));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(spec.seed, "split"));
  Shuffle(order, rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.train_fraction));
  Split split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

double TrainEvalTree(const Matrix &x, std::span<const int> labels, const Split &split,
                     const TreeParams &params, int threads) {
  if (split.test.empty()) throw Error(ErrorCode::kInvalidArgument, "empty test split");
  DecisionTreeClassifier tree(params);
  tree.Fit(x, labels, split.train, threads);
  const auto predicted = tree.Predict(x, split.test);
  std::vector<int> truth;
  truth.reserve(split.test.size());
  for (std::size_t r : split.test) truth.push_back(labels[r]);
  return F1Macro(truth, predicted);
}

RegressionScore TrainEvalGbdt(const Matrix &x, std::span<const double> targets,
                              const Split &split, const GbdtParams &params, int threads) {
  if (split.test.empty()) throw Error(ErrorCode::kInvalidArgument, "empty test split");
  GbdtRegressor model(params);
  model.Fit(x, targets, split.train, threads);
  const auto predicted = model.Predict(x, split.test);
  std::vector<double> truth;
  truth.reserve(split.test.size());
  for (std::size_t r : split.test) truth.push_back(targets[r]);
  return {Srcc(truth, predicted), MeanSquaredError(truth, predicted)};
}

namespace {

// Dense class ids in sorted order of the key.
template <typename Key, typename Fn>
std::vector<int> Encode(const EvaluationDataset &ds, Fn &&key_of) {
  std::map<Key, int> ids;
  for (const auto &r : ds.records()) ids.emplace(key_of(r), 0);
  int next = 0;
  for (auto &[k, id] : ids) id = next++;
  std::vector<int> labels;
  labels.reserve(ds.size());
  for (const auto &r : ds.records()) labels.push_back(ids.at(key_of(r)));
  return labels;
}

std::vector<int> ClassLabels(const EvaluationDataset &ds, ProbeTarget target) {
  switch (target) {
    case ProbeTarget::kSpeakerId: {
      std::vector<int> labels(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i) labels[i] = static_cast<int>(ds.speaker_of(i));
      return labels;
    }
    case ProbeTarget::kGender:
      return Encode<int>(ds, [](const UtteranceRecord &r) { return static_cast<int>(r.gender); });
    case ProbeTarget::kCharCount:
      return Encode<int>(ds, [](const UtteranceRecord &r) { return r.char_count; });
    case ProbeTarget::kRecordingCondition:
      return Encode<std::string>(ds, [](const UtteranceRecord &r) { return r.subset; });
    default:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "not a classification target");
}

// Empty optional when some record lacks the field.
std::optional<std::vector<double>> RegressionTargets(const EvaluationDataset &ds,
                                                     ProbeTarget target) {
  std::vector<double> y;
  y.reserve(ds.size());
  switch (target) {
    case ProbeTarget::kDuration:
      for (const auto &r : ds.records()) y.push_back(r.duration_s);
      return y;
    case ProbeTarget::kSnr:
      for (const auto &r : ds.records()) {
        if (!r.snr_db) return std::nullopt;
        y.push_back(*r.snr_db);
      }
      return y;
    case ProbeTarget::kF0:
      for (const auto &r : ds.records()) {
        if (!r.f0_hz) return std::nullopt;
        y.push_back(*r.f0_hz);
      }
      return y;
    case ProbeTarget::kContent: {
      const auto ranks = Encode<std::string>(
          ds, [](const UtteranceRecord &r) { return r.utterance_id; });
      for (int rank : ranks) y.push_back(static_cast<double>(rank));
      return y;
    }
    default:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "not a regression target");
}

}  // namespace

std::vector<ProbeResult> RunBattery(const EvaluationDataset &ds, const BatteryOptions &options,
                                    std::vector<std::string> *warnings) {
  if (ds.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty dataset");
  const Split split = SplitDataset(ds.size(), options.split);
  std::vector<ProbeResult> results;
  for (const auto &task : CanonicalTasks()) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), task.target) == options.only.end())
      continue;
    ProbeResult result{task, "", 0.0, std::nullopt};
    if (task.kind == ProbeKind::kClassification) {
      const auto labels = ClassLabels(ds, task.target);
      result.metric = "macro_f1";
      result.score = TrainEvalTree(ds.embeddings(), labels, split, options.tree, options.threads);
    } else {
      const auto targets = RegressionTargets(ds, task.target);
      if (!targets) {
        if (warnings)
          warnings->push_back(
              fmt::format("skipping probe '{}': field missing on some records", task.name));
        continue;
      }
      result.metric = "srcc";
      const auto score =
          TrainEvalGbdt(ds.embeddings(), *targets, split, options.gbdt, options.threads);
      result.score = score.srcc;
      if (task.target == ProbeTarget::kF0) result.mse = score.mse;
    }
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace embprobe
