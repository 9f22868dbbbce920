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

#ifndef EMBPROBE_PROBES_HPP_
#define EMBPROBE_PROBES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embprobe/corpus.hpp"
#include "embprobe/decision_tree.hpp"
#include "embprobe/gbdt.hpp"
#include "embprobe/matrix.hpp"

namespace embprobe {

enum class ProbeKind { kClassification, kRegression };
enum class Direction { kHigherBetter, kLowerBetter };

enum class ProbeTarget {
  kSpeakerId,
  kGender,
  kCharCount,           // each distinct character count is a class
  kRecordingCondition,  // subset label as class
  kDuration,
  kSnr,
  kContent,             // utterance_id mapped to its lexicographic rank
  kF0,
};

struct ProbeTask {
  std::string name;
  ProbeKind kind = ProbeKind::kClassification;
  ProbeTarget target = ProbeTarget::kSpeakerId;
  Direction direction = Direction::kHigherBetter;
};

std::string_view ToString(ProbeKind kind);
std::string_view ToString(Direction direction);  // "higher_better" / "lower_better"

// The eight tasks, classification first, in report column order.
const std::vector<ProbeTask> &CanonicalTasks();
const ProbeTask &TaskFor(ProbeTarget target);
std::optional<ProbeTarget> TargetFromName(std::string_view name);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Seeded permutation; |train| = round(n * train_fraction).
Split SplitDataset(std::size_t n, const SplitSpec &spec);

// Macro-F1 of a CART tree on the test rows.
double TrainEvalTree(const Matrix &x, std::span<const int> labels, const Split &split,
                     const TreeParams &params = {}, int threads = 1);

struct RegressionScore {
  double srcc = 0.0;
  double mse = 0.0;
};

// SRCC and MSE of a GBDT regressor on the test rows.
RegressionScore TrainEvalGbdt(const Matrix &x, std::span<const double> targets,
                              const Split &split, const GbdtParams &params = {},
                              int threads = 1);

struct ProbeResult {
  ProbeTask task;
  std::string metric;  // "macro_f1" or "srcc"
  double score = 0.0;
  std::optional<double> mse;  // F0 task only, in Hz^2
};

struct BatteryOptions {
  SplitSpec split;
  TreeParams tree;
  GbdtParams gbdt;
  int threads = 1;
  std::vector<ProbeTarget> only;  // empty = all eight
};

// Runs the probing tasks on one dataset. Tasks whose optional manifest field
// (snr_db, f0_hz) is missing on any record are skipped and reported through
// `warnings`. Trainer errors propagate.
std::vector<ProbeResult> RunBattery(const EvaluationDataset &dataset,
                                    const BatteryOptions &options,
                                    std::vector<std::string> *warnings = nullptr);

}  // namespace embprobe

#endif  // EMBPROBE_PROBES_HPP_
