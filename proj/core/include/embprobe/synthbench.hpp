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

#ifndef EMBPROBE_SYNTHBENCH_HPP_
#define EMBPROBE_SYNTHBENCH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "embprobe/corpus.hpp"

namespace embprobe {

enum class SynthFactor { kDuration, kCondition, kContent, kF0, kSnr };
inline constexpr std::size_t kSynthFactorCount = 5;
inline constexpr std::array<SynthFactor, kSynthFactorCount> kSynthFactors = {
    SynthFactor::kDuration, SynthFactor::kCondition, SynthFactor::kContent,
    SynthFactor::kF0, SynthFactor::kSnr};

std::string_view ToString(SynthFactor factor);
std::optional<SynthFactor> SynthFactorFromName(std::string_view name);

// Coordinates 0..4 carry the nuisance factors (in kSynthFactors order),
// coordinate 5 carries gender, the rest hold speaker structure.
inline constexpr std::size_t kGenderAxis = kSynthFactorCount;
inline constexpr std::size_t kReservedAxes = kSynthFactorCount + 1;
inline constexpr double kGenderLeakage = 1.0;

struct SynthSpec {
  int n_speakers = 20;
  int utts_per_speaker = 100;
  int dim = 192;
  double speaker_spread = 0.05;  // per-coordinate noise sd
  double session_spread = 0.03;  // per-coordinate sd of session offsets
  int session_clusters = 2;
  std::array<double, kSynthFactorCount> leakage{};  // indexed like kSynthFactors
  std::uint64_t seed = 0;

  double &leak(SynthFactor f) { return leakage[static_cast<std::size_t>(f)]; }
  double leak(SynthFactor f) const { return leakage[static_cast<std::size_t>(f)]; }
};

// Throws SpecInvalid.
void ValidateSpec(const SynthSpec &spec);

struct UtteranceTruth {
  std::string utterance_key;
  int session = 0;
  std::array<double, kSynthFactorCount> raw{};  // duration s, condition, prompt, Hz, dB
  std::array<double, kSynthFactorCount> z{};
  double gender_z = 0.0;
};

struct SynthCorpus {
  SynthSpec spec;
  std::vector<UtteranceRecord> records;
  EmbeddingSet embeddings{"synth", 1};
  std::vector<UtteranceTruth> truth;  // parallel to records
};

SynthCorpus Generate(const SynthSpec &spec);

// Writes manifest.csv, embeddings.emb and truth.json into `dir`.
void WriteSynthCorpus(const SynthCorpus &corpus, const std::filesystem::path &dir);

}  // namespace embprobe

#endif  // EMBPROBE_SYNTHBENCH_HPP_
