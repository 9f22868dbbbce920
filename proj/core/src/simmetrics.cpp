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

#include "embprobe/simmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "embprobe/error.hpp"
#include "embprobe/parallel.hpp"
#include "embprobe/rng.hpp"

namespace embprobe {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Clamp(double c) { return std::clamp(c, -1.0, 1.0); }

// Row norms, checked non-zero.
std::vector<double> RowNorms(const EvaluationDataset &ds) {
  std::vector<double> norms(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    norms[i] = std::sqrt(Dot(ds.embedding(i), ds.embedding(i)));
    if (norms[i] == 0.0)
      throw Error(ErrorCode::kZeroVector,
                  fmt::format("embedding of '{}' is all zeros", ds.record(i).utterance_key));
  }
  return norms;
}

double PairCosine(const EvaluationDataset &ds, const std::vector<double> &norms,
                  std::size_t a, std::size_t b) {
  return Clamp(Dot(ds.embedding(a), ds.embedding(b)) / (norms[a] * norms[b]));
}

std::uint64_t PairKey(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Picks `count` items from `pool` uniformly without replacement, in draw order.
template <typename T>
std::vector<T> PartialShuffle(std::vector<T> pool, std::size_t count, Rng &rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("cosine of vectors with {} and {} components", a.size(), b.size()));
  const double na = std::sqrt(Dot(a, a));
  const double nb = std::sqrt(Dot(b, b));
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return Clamp(Dot(a, b) / (na * nb));
}

std::size_t TrialList::CountSame() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const Trial &t) { return t.same_speaker; }));
}

TrialList SampleTrials(const EvaluationDataset &ds, int per_speaker, int same_per_speaker,
                       std::uint64_t seed) {
  if (per_speaker < 0 || same_per_speaker < 0 || same_per_speaker > per_speaker)
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("need 0 <= same ({}) <= per-speaker ({})", same_per_speaker,
                            per_speaker));
  TrialList out;
  out.seed = seed;
  out.per_speaker = per_speaker;
  out.same_per_speaker = same_per_speaker;
  out.trials.reserve(ds.speakers().size() * static_cast<std::size_t>(per_speaker));

  const std::size_t n_total = ds.size();
  const std::size_t n_diff = static_cast<std::size_t>(per_speaker - same_per_speaker);
  const std::size_t n_same = static_cast<std::size_t>(same_per_speaker);
  std::unordered_set<std::uint64_t> used;
  // Different-speaker pairs already taken that involve each speaker.
  std::vector<std::size_t> used_by_speaker(ds.speakers().size(), 0);

  for (std::size_t s = 0; s < ds.speakers().size(); ++s) {
    const std::string &speaker = ds.speakers()[s];
    Rng rng(DeriveSeed(seed, "trials/" + speaker));
    const auto rows = ds.utterances_of(s);
    const std::size_t n = rows.size();

    // Same-speaker pairs cannot collide with any other anchor's pairs.
    const std::size_t same_pool = n * (n - 1) / 2;
    if (n_same > same_pool)
      throw Error(ErrorCode::kInsufficientPairs,
                  fmt::format("speaker '{}' has {} utterances ({} pairs), {} same-speaker "
                              "trials requested",
                              speaker, n, same_pool, n_same));
    if (2 * n_same >= same_pool) {
      std::vector<std::pair<std::size_t, std::size_t>> pool;
      pool.reserve(same_pool);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pool.emplace_back(rows[i], rows[j]);
      for (auto [a, b] : PartialShuffle(std::move(pool), n_same, rng)) {
        used.insert(PairKey(a, b));
        out.trials.push_back({a, b, true});
      }
    } else {
      std::size_t drawn = 0;
      while (drawn < n_same) {
        const std::size_t i = static_cast<std::size_t>(rng.Below(n));
        std::size_t j = static_cast<std::size_t>(rng.Below(n - 1));
        if (j >= i) ++j;
        const std::size_t a = rows[std::min(i, j)];
        const std::size_t b = rows[std::max(i, j)];
        if (used.insert(PairKey(a, b)).second) {
          out.trials.push_back({a, b, true});
          ++drawn;
        }
      }
    }

    if (n_diff == 0) continue;
    std::vector<std::size_t> others;
    others.reserve(n_total - n);
    for (std::size_t r = 0; r < n_total; ++r)
      if (ds.speaker_of(r) != s) others.push_back(r);
    const std::size_t diff_pool = n * others.size();
    const std::size_t available = diff_pool - used_by_speaker[s];
    if (n_diff > available)
      throw Error(ErrorCode::kInsufficientPairs,
                  fmt::format("speaker '{}' has {} unused different-speaker pairs, {} requested",
                              speaker, available, n_diff));
    auto take = [&](std::size_t a, std::size_t b) {
      out.trials.push_back({a, b, false});
      ++used_by_speaker[s];
      ++used_by_speaker[ds.speaker_of(b)];
    };
    if (2 * n_diff >= available) {
      std::vector<std::pair<std::size_t, std::size_t>> pool;
      pool.reserve(available);
      for (std::size_t a : rows)
        for (std::size_t b : others)
          if (!used.contains(PairKey(a, b))) pool.emplace_back(a, b);
      for (auto [a, b] : PartialShuffle(std::move(pool), n_diff, rng)) {
        used.insert(PairKey(a, b));
        take(a, b);
      }
    } else {
      std::size_t drawn = 0;
      while (drawn < n_diff) {
        const std::size_t a = rows[static_cast<std::size_t>(rng.Below(n))];
        const std::size_t b = others[static_cast<std::size_t>(rng.Below(others.size()))];
        if (used.insert(PairKey(a, b)).second) {
          take(a, b);
          ++drawn;
        }
      }
    }
  }
  return out;
}

void WriteTrials(const TrialList &trials, const EvaluationDataset &ds,
                 const std::filesystem::path &csv_path, const std::filesystem::path &json_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + csv_path.string());
    out << "key_a,key_b,same_speaker\n";
    for (const auto &t : trials.trials)
      out << csv::Escape(ds.record(t.a).utterance_key) << ','
          << csv::Escape(ds.record(t.b).utterance_key) << ',' << (t.same_speaker ? 1 : 0)
          << '\n';
  }
  nlohmann::ordered_json meta;
  meta["seed"] = trials.seed;
  meta["per_speaker"] = trials.per_speaker;
  meta["same_per_speaker"] = trials.same_per_speaker;
  meta["speakers"] = ds.speakers().size();
  meta["trials"] = trials.trials.size();
  meta["same_speaker_trials"] = trials.CountSame();
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + json_path.string());
  out << meta.dump(2) << '\n';
}

TrialList ReadTrials(const EvaluationDataset &ds, const std::filesystem::path &csv_path,
                     const std::filesystem::path &json_path) {
  TrialList out;
  {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + json_path.string());
    try {
      const auto meta = nlohmann::json::parse(in);
      out.seed = meta.at("seed").get<std::uint64_t>();
      out.per_speaker = meta.at("per_speaker").get<int>();
      out.same_per_speaker = meta.at("same_per_speaker").get<int>();
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kBadValue, json_path.string() + ": " + e.what());
    }
  }
  const csv::Table table = csv::ReadFile(csv_path);
  const std::string source = csv_path.string();
  const auto ca = table.Column("key_a");
  const auto cb = table.Column("key_b");
  const auto cs = table.Column("same_speaker");
  if (!ca) throw Error(ErrorCode::kMissingColumn, source + ": key_a");
  if (!cb) throw Error(ErrorCode::kMissingColumn, source + ": key_b");
  if (!cs) throw Error(ErrorCode::kMissingColumn, source + ": same_speaker");
  std::unordered_set<std::uint64_t> seen;
  for (const auto &row : table.rows) {
    const auto ctx = fmt::format("{}:{}", source, row.line);
    if (row.fields.size() != table.header.size())
      throw Error(ErrorCode::kBadValue, ctx + ": wrong number of fields");
    const auto a = ds.IndexOfKey(row.fields[*ca]);
    const auto b = ds.IndexOfKey(row.fields[*cb]);
    if (!a) throw Error(ErrorCode::kMissingEmbedding, ctx + ": unknown key " + row.fields[*ca]);
    if (!b) throw Error(ErrorCode::kMissingEmbedding, ctx + ": unknown key " + row.fields[*cb]);
    const std::string &flag = row.fields[*cs];
    if (flag != "0" && flag != "1")
      throw Error(ErrorCode::kBadValue, ctx + ": same_speaker must be 0 or 1");
    const bool same = flag == "1";
    if (*a == *b) throw Error(ErrorCode::kBadValue, ctx + ": trial pairs an utterance with itself");
    if (same != (ds.speaker_of(*a) == ds.speaker_of(*b)))
      throw Error(ErrorCode::kBadValue, ctx + ": same_speaker flag disagrees with the manifest");
    if (!seen.insert(PairKey(*a, *b)).second)
      throw Error(ErrorCode::kDuplicateKey, ctx + ": repeated pair");
    out.trials.push_back({*a, *b, same});
  }
  return out;
}

EerResult ComputeEer(std::span<const double> same_scores, std::span<const double> diff_scores) {
  if (same_scores.empty() || diff_scores.empty())
    throw Error(ErrorCode::kDegenerateTrials,
                fmt::format("{} same-speaker and {} different-speaker scores", same_scores.size(),
                            diff_scores.size()));
  std::vector<double> same(same_scores.begin(), same_scores.end());
  std::vector<double> diff(diff_scores.begin(), diff_scores.end());
  std::sort(same.begin(), same.end());
  std::sort(diff.begin(), diff.end());
  const double ns = static_cast<double>(same.size());
  const double nd = static_cast<double>(diff.size());

  std::vector<double> thresholds;
  thresholds.reserve(same.size() + diff.size() + 1);
  std::merge(same.begin(), same.end(), diff.begin(), diff.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  std::size_t same_below = 0;  // #same < t
  std::size_t diff_below = 0;  // #diff < t
  double prev_far = 0.0, prev_frr = 0.0, prev_t = 0.0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    while (same_below < same.size() && same[same_below] < t) ++same_below;
    while (diff_below < diff.size() && diff[diff_below] < t) ++diff_below;
    const double far = static_cast<double>(diff.size() - diff_below) / nd;
    const double frr = static_cast<double>(same_below) / ns;
    const double gap = far - frr;
    if (gap == 0.0) return {(far + frr) / 2.0, t, same.size(), diff.size()};
    if (gap < 0.0) {
      // k > 0 here: at the lowest threshold FAR = 1 and FRR = 0.
      const double prev_gap = prev_far - prev_frr;
      const double alpha = prev_gap / (prev_gap - gap);
      const double far_x = prev_far + alpha * (far - prev_far);
      const double frr_x = prev_frr + alpha * (frr - prev_frr);
      const double t_x = std::isinf(t) ? prev_t : prev_t + alpha * (t - prev_t);
      return {(far_x + frr_x) / 2.0, t_x, same.size(), diff.size()};
    }
    prev_far = far;
    prev_frr = frr;
    prev_t = t;
  }
  // Unreachable: at +inf FAR = 0 and FRR = 1.
  throw Error(ErrorCode::kDegenerateTrials, "threshold sweep did not cross");
}

std::vector<double> ScoreTrials(const EvaluationDataset &ds, std::span<const Trial> trials,
                                int threads) {
  const auto norms = RowNorms(ds);
  std::vector<double> scores(trials.size());
  ParallelFor(trials.size(), threads, [&](std::size_t i) {
    scores[i] = PairCosine(ds, norms, trials[i].a, trials[i].b);
  });
  return scores;
}

EerResult EerFromTrials(const EvaluationDataset &ds, const TrialList &trials, int threads) {
  const auto scores = ScoreTrials(ds, trials.trials, threads);
  std::vector<double> same, diff;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (trials.trials[i].same_speaker ? same : diff).push_back(scores[i]);
  return ComputeEer(same, diff);
}

std::map<std::string, double> IntraSpeakerMeans(const EvaluationDataset &ds, int threads) {
  const auto norms = RowNorms(ds);
  const std::size_t n_speakers = ds.speakers().size();
  std::vector<double> means(n_speakers);
  ParallelFor(n_speakers, threads, [&](std::size_t s) {
    const auto rows = ds.utterances_of(s);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        sum += PairCosine(ds, norms, rows[i], rows[j]);
        ++count;
      }
    means[s] = sum / static_cast<double>(count);
  });
  std::map<std::string, double> out;
  for (std::size_t s = 0; s < n_speakers; ++s) out.emplace(ds.speakers()[s], means[s]);
  return out;
}

SimilarityMatrix InterSpeakerMatrix(const EvaluationDataset &ds, const TrialList &trials,
                                    std::span<const double> scores,
                                    const std::map<std::string, double> &intra) {
  if (scores.size() != trials.trials.size())
    throw Error(ErrorCode::kLengthMismatch, "one score per trial required");
  const std::size_t n = ds.speakers().size();
  std::vector<double> sums(n * n, 0.0);
  std::vector<std::size_t> counts(n * n, 0);
  for (std::size_t t = 0; t < trials.trials.size(); ++t) {
    const auto &trial = trials.trials[t];
    if (trial.same_speaker) continue;
    std::size_t i = ds.speaker_of(trial.a), j = ds.speaker_of(trial.b);
    if (i > j) std::swap(i, j);
    sums[i * n + j] += scores[t];
    ++counts[i * n + j];
  }
  SimilarityMatrix m;
  m.speakers = ds.speakers();
  m.values.assign(n * n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto it = intra.find(ds.speakers()[i]); it != intra.end()) m.values[i * n + i] = it->second;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (counts[i * n + j] == 0) continue;
      const double mean = sums[i * n + j] / static_cast<double>(counts[i * n + j]);
      m.values[i * n + j] = mean;
      m.values[j * n + i] = mean;
    }
  }
  return m;
}

std::vector<SpeakerPair> ClosestPairs(const SimilarityMatrix &matrix, std::size_t limit) {
  std::vector<SpeakerPair> pairs;
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t j = i + 1; j < matrix.size(); ++j)
      if (auto v = matrix.at(i, j)) pairs.push_back({matrix.speakers[i], matrix.speakers[j], *v});
  std::stable_sort(pairs.begin(), pairs.end(), [](const SpeakerPair &x, const SpeakerPair &y) {
    return x.similarity > y.similarity;
  });
  if (pairs.size() > limit) pairs.resize(limit);
  return pairs;
}

std::string FormatSpeakerPair(const SpeakerPair &pair) {
  return fmt::format("{}/{} {:.2f}", pair.first, pair.second, pair.similarity);
}

std::vector<Group> StandardGroups(const EvaluationDataset &ds) {
  std::vector<Group> groups = {{"all", Grouping::kAll, ""},
                               {"female", Grouping::kGender, "F"},
                               {"male", Grouping::kGender, "M"}};
  std::set<std::string> subsets;
  for (const auto &r : ds.records()) subsets.insert(r.subset);
  for (const auto &s : subsets) groups.push_back({s, Grouping::kSubset, s});
  return groups;
}

bool InGroup(const UtteranceRecord &record, const Group &group) {
  switch (group.grouping) {
    case Grouping::kAll: return true;
    case Grouping::kGender: return ToString(record.gender) == group.value;
    case Grouping::kSubset: return record.subset == group.value;
  }
  return false;
}

EerResult GroupEer(const EvaluationDataset &ds, const TrialList &trials,
                   std::span<const double> scores, const Group &group) {
  if (scores.size() != trials.trials.size())
    throw Error(ErrorCode::kLengthMismatch, "one score per trial required");
  std::vector<double> same, diff;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto &t = trials.trials[i];
    if (!InGroup(ds.record(t.a), group) || !InGroup(ds.record(t.b), group)) continue;
    (t.same_speaker ? same : diff).push_back(scores[i]);
  }
  if (same.empty() && diff.empty())
    throw Error(ErrorCode::kEmptyGroup, group.name);
  return ComputeEer(same, diff);
}

double GroupSpeakerMean(const EvaluationDataset &ds,
                        const std::map<std::string, double> &per_speaker, const Group &group) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < ds.speakers().size(); ++s) {
    const auto &first = ds.record(ds.utterances_of(s).front());
    if (!InGroup(first, group)) continue;
    auto it = per_speaker.find(ds.speakers()[s]);
    if (it == per_speaker.end()) continue;
    sum += it->second;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::kEmptyGroup, group.name);
  return sum / static_cast<double>(count);
}

double GroupInterMean(const EvaluationDataset &ds, const SimilarityMatrix &matrix,
                      const Group &group) {
  std::vector<bool> member(matrix.size(), false);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto s = ds.SpeakerOrdinal(matrix.speakers[i]);
    member[i] = s && InGroup(ds.record(ds.utterances_of(*s).front()), group);
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t j = i + 1; j < matrix.size(); ++j)
      if (member[i] && member[j])
        if (auto v = matrix.at(i, j)) {
          sum += *v;
          ++count;
        }
  if (count == 0) throw Error(ErrorCode::kEmptyGroup, group.name);
  return sum / static_cast<double>(count);
}

namespace {

template <typename Fn>
std::vector<GroupValue> Collect(std::span<const Group> groups, Fn &&fn) {
  std::vector<GroupValue> out;
  for (const auto &g : groups) {
    GroupValue gv{g.name, std::nullopt};
    try {
      gv.value = fn(g);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kEmptyGroup && e.code() != ErrorCode::kDegenerateTrials) throw;
    }
    out.push_back(std::move(gv));
  }
  return out;
}

}  // namespace

std::vector<GroupValue> AggregateEer(const EvaluationDataset &ds, const TrialList &trials,
                                     std::span<const double> scores,
                                     std::span<const Group> groups) {
  return Collect(groups, [&](const Group &g) { return GroupEer(ds, trials, scores, g).eer; });
}

std::vector<GroupValue> AggregateSpeakerMeans(const EvaluationDataset &ds,
                                              const std::map<std::string, double> &per_speaker,
                                              std::span<const Group> groups) {
  return Collect(groups, [&](const Group &g) { return GroupSpeakerMean(ds, per_speaker, g); });
}

std::vector<GroupValue> AggregateInter(const EvaluationDataset &ds,
                                       const SimilarityMatrix &matrix,
                                       std::span<const Group> groups) {
  return Collect(groups, [&](const Group &g) { return GroupInterMean(ds, matrix, g); });
}

}  // namespace embprobe
