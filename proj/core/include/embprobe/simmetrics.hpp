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

#ifndef EMBPROBE_SIMMETRICS_HPP_
#define EMBPROBE_SIMMETRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embprobe/corpus.hpp"

namespace embprobe {

/// Cosine similarity, clamped to [-1, 1]. Throws DimMismatch or ZeroVector.
double Cosine(std::span<const double> a, std::span<const double> b);

/// A pair of dataset rows. Row `a` is the anchor utterance.
struct Trial {
  std::size_t a = 0;
  std::size_t b = 0;
  bool same_speaker = false;

  bool operator==(const Trial &) const = default;
};

struct TrialList {
  std::vector<Trial> trials;
  std::uint64_t seed = 0;
  int per_speaker = 0;
  int same_per_speaker = 0;

  std::size_t CountSame() const;
  bool operator==(const TrialList &) const = default;
};

// Every speaker anchors exactly `per_speaker` trials, `same_per_speaker` of
// them same-speaker; total = speakers * per_speaker. Unordered pairs are drawn
// uniformly without replacement and never repeat across the whole list.
// Randomness is keyed by (seed, speaker id). Throws InsufficientPairs.
TrialList SampleTrials(const EvaluationDataset &dataset, int per_speaker,
                       int same_per_speaker, std::uint64_t seed);

// CSV `key_a,key_b,same_speaker` plus a JSON sidecar with seed and quotas.
void WriteTrials(const TrialList &trials, const EvaluationDataset &dataset,
                 const std::filesystem::path &csv_path,
                 const std::filesystem::path &json_path);
TrialList ReadTrials(const EvaluationDataset &dataset, const std::filesystem::path &csv_path,
                     const std::filesystem::path &json_path);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  std::size_t n_same = 0;
  std::size_t n_diff = 0;
};

// Sweeps every distinct score (plus +inf) as a threshold with
// FAR(t) = #diff >= t / n_diff and FRR(t) = #same < t / n_same. The EER sits
// where FAR - FRR first reaches zero; if it jumps across zero between two
// thresholds, FAR and FRR are interpolated linearly to the crossing.
// Throws DegenerateTrials when either list is empty.
EerResult ComputeEer(std::span<const double> same_scores, std::span<const double> diff_scores);

// Cosine score per trial, in trial order.
std::vector<double> ScoreTrials(const EvaluationDataset &dataset, std::span<const Trial> trials,
                                int threads = 1);

EerResult EerFromTrials(const EvaluationDataset &dataset, const TrialList &trials,
                        int threads = 1);

// Mean cosine over all unordered same-speaker pairs, keyed by speaker id.
std::map<std::string, double> IntraSpeakerMeans(const EvaluationDataset &dataset,
                                                int threads = 1);

struct SimilarityMatrix {
  std::vector<std::string> speakers;
  // Row-major S x S. Off-diagonal cells without any trial are nullopt.
  std::vector<std::optional<double>> values;

  std::size_t size() const noexcept { return speakers.size(); }
  std::optional<double> at(std::size_t i, std::size_t j) const {
    return values[i * speakers.size() + j];
  }
};

// Off-diagonal cells are the mean cosine over different-speaker trials between
// the two speakers; the diagonal is the intra-speaker mean.
SimilarityMatrix InterSpeakerMatrix(const EvaluationDataset &dataset, const TrialList &trials,
                                    std::span<const double> scores,
                                    const std::map<std::string, double> &intra);

struct SpeakerPair {
  std::string first;
  std::string second;
  double similarity = 0.0;
};

// Most similar distinct speaker pairs, highest first (ties by name).
std::vector<SpeakerPair> ClosestPairs(const SimilarityMatrix &matrix, std::size_t limit);

// "htm/mar 0.42"
std::string FormatSpeakerPair(const SpeakerPair &pair);

enum class Grouping { kAll, kGender, kSubset };

struct Group {
  std::string name;
  Grouping grouping = Grouping::kAll;
  std::string value;  // "F"/"M" or the subset label
};

// all, female, male, then one group per subset label in sorted order.
std::vector<Group> StandardGroups(const EvaluationDataset &dataset);

bool InGroup(const UtteranceRecord &record, const Group &group);

// EER over the trials whose two utterances both fall in the group.
// Throws EmptyGroup or DegenerateTrials.
EerResult GroupEer(const EvaluationDataset &dataset, const TrialList &trials,
                   std::span<const double> scores, const Group &group);

// Average of per-speaker values over the speakers in the group.
double GroupSpeakerMean(const EvaluationDataset &dataset,
                        const std::map<std::string, double> &per_speaker, const Group &group);

// Average of the present off-diagonal cells between speakers of the group.
double GroupInterMean(const EvaluationDataset &dataset, const SimilarityMatrix &matrix,
                      const Group &group);

struct GroupValue {
  std::string group;
  std::optional<double> value;  // nullopt when the group is empty or degenerate

  bool operator==(const GroupValue &) const = default;
};

std::vector<GroupValue> AggregateEer(const EvaluationDataset &dataset, const TrialList &trials,
                                     std::span<const double> scores,
                                     std::span<const Group> groups);
std::vector<GroupValue> AggregateSpeakerMeans(const EvaluationDataset &dataset,
                                              const std::map<std::string, double> &per_speaker,
                                              std::span<const Group> groups);
std::vector<GroupValue> AggregateInter(const EvaluationDataset &dataset,
                                       const SimilarityMatrix &matrix,
                                       std::span<const Group> groups);

}  // namespace embprobe

#endif  // EMBPROBE_SIMMETRICS_HPP_
