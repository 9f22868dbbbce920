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

#include "embprobe/synthbench.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "embprobe/error.hpp"
#include "embprobe/rng.hpp"

namespace embprobe {
namespace {

constexpr double kDurationLo = 1.0, kDurationHi = 15.0;
constexpr double kSnrLo = 10.0, kSnrHi = 60.0;
constexpr int kCharLo = 20, kCharHi = 200;
constexpr double kF0MeanF = 210.0, kF0SdF = 25.0;
constexpr double kF0MeanM = 120.0, kF0SdM = 20.0;

double UniformZ(double v, double lo, double hi) {
  return (v - (lo + hi) / 2.0) / ((hi - lo) / std::sqrt(12.0));
}

std::size_t Index(SynthFactor f) { return static_cast<std::size_t>(f); }

}  // namespace

std::string_view ToString(SynthFactor factor) {
  switch (factor) {
    case SynthFactor::kDuration: return "duration";
    case SynthFactor::kCondition: return "condition";
    case SynthFactor::kContent: return "content";
    case SynthFactor::kF0: return "f0";
    case SynthFactor::kSnr: return "snr";
  }
  return "?";
}

std::optional<SynthFactor> SynthFactorFromName(std::string_view name) {
  for (SynthFactor f : kSynthFactors)
    if (ToString(f) == name) return f;
  return std::nullopt;
}

void ValidateSpec(const SynthSpec &spec) {
  auto fail = [](const std::string &msg) { throw Error(ErrorCode::kSpecInvalid, msg); };
  if (spec.n_speakers < 2) fail("n_speakers must be >= 2");
  if (spec.utts_per_speaker < 2) fail("utts_per_speaker must be >= 2");
  if (spec.dim <= static_cast<int>(kReservedAxes))
    fail(fmt::format("dim must exceed {} reserved axes", kReservedAxes));
  if (spec.session_clusters < 1) fail("session_clusters must be >= 1");
  if (!(spec.speaker_spread >= 0.0) || !std::isfinite(spec.speaker_spread))
    fail("speaker_spread must be finite and >= 0");
  if (!(spec.session_spread >= 0.0) || !std::isfinite(spec.session_spread))
    fail("session_spread must be finite and >= 0");
  for (SynthFactor f : kSynthFactors) {
    const double c = spec.leak(f);
    if (!(c >= 0.0 && c <= 1.0))
      fail(fmt::format("leakage[{}] = {} outside [0, 1]", ToString(f), c));
  }
}

SynthCorpus Generate(const SynthSpec &spec) {
  ValidateSpec(spec);
  const auto dim = static_cast<std::size_t>(spec.dim);
  const std::size_t free_dims = dim - kReservedAxes;
  const int prompts = spec.utts_per_speaker;

  std::vector<int> char_counts(static_cast<std::size_t>(prompts));
  for (int u = 0; u < prompts; ++u) {
    Rng rng(DeriveSeed(spec.seed, "prompt", static_cast<std::uint64_t>(u)));
    char_counts[static_cast<std::size_t>(u)] =
        kCharLo + static_cast<int>(rng.Below(kCharHi - kCharLo + 1));
  }
  const double prompt_mid = (prompts - 1) / 2.0;
  const double prompt_sd = std::sqrt((static_cast<double>(prompts) * prompts - 1.0) / 12.0);

  SynthCorpus out;
  out.spec = spec;
  out.embeddings = EmbeddingSet("synth", dim);

  for (int s = 0; s < spec.n_speakers; ++s) {
    const auto su = static_cast<std::uint64_t>(s);
    const std::string speaker = fmt::format("spk{:03d}", s);
    const bool female = s % 2 == 0;
    const int condition = (s / 2) % 2;
    const double condition_z = condition == 0 ? -1.0 : 1.0;

    std::vector<double> centroid(free_dims);
    {
      Rng rng(DeriveSeed(spec.seed, "centroid", su));
      double norm = 0.0;
      while (norm == 0.0) {
        norm = 0.0;
        for (double &c : centroid) {
          c = rng.Normal();
          norm += c * c;
        }
      }
      norm = std::sqrt(norm);
      for (double &c : centroid) c /= norm;
    }
    std::vector<std::vector<double>> sessions(static_cast<std::size_t>(spec.session_clusters),
                                              std::vector<double>(free_dims));
    for (std::size_t k = 0; k < sessions.size(); ++k) {
      Rng rng(DeriveSeed(spec.seed, "session", su, k));
      for (double &c : sessions[k]) c = rng.Normal(0.0, spec.session_spread);
    }

    for (int u = 0; u < prompts; ++u) {
      Rng rng(DeriveSeed(spec.seed, "utterance", su, static_cast<std::uint64_t>(u)));
      UtteranceTruth t;
      t.utterance_key = fmt::format("{}_p{:04d}", speaker, u);
      t.session = static_cast<int>(rng.Below(static_cast<std::uint64_t>(spec.session_clusters)));

      const double duration = rng.Uniform(kDurationLo, kDurationHi);
      const double snr = rng.Uniform(kSnrLo, kSnrHi);
      const double f0_mean = female ? kF0MeanF : kF0MeanM;
      const double f0_sd = female ? kF0SdF : kF0SdM;
      double f0 = rng.Normal(f0_mean, f0_sd);
      f0 = std::max(f0, 1.0);

      t.raw[Index(SynthFactor::kDuration)] = duration;
      t.raw[Index(SynthFactor::kCondition)] = condition;
      t.raw[Index(SynthFactor::kContent)] = u;
      t.raw[Index(SynthFactor::kF0)] = f0;
      t.raw[Index(SynthFactor::kSnr)] = snr;
      t.z[Index(SynthFactor::kDuration)] = UniformZ(duration, kDurationLo, kDurationHi);
      t.z[Index(SynthFactor::kCondition)] = condition_z;
      t.z[Index(SynthFactor::kContent)] = (u - prompt_mid) / prompt_sd;
      t.z[Index(SynthFactor::kF0)] = (f0 - f0_mean) / f0_sd;
      t.z[Index(SynthFactor::kSnr)] = UniformZ(snr, kSnrLo, kSnrHi);
      t.gender_z = female ? 1.0 : -1.0;

      std::vector<float> v(dim);
      for (SynthFactor f : kSynthFactors)
        v[Index(f)] = static_cast<float>(spec.leak(f) * t.z[Index(f)]);
      v[kGenderAxis] = static_cast<float>(kGenderLeakage * t.gender_z);
      const auto &offset = sessions[static_cast<std::size_t>(t.session)];
      for (std::size_t k = 0; k < free_dims; ++k)
        v[kReservedAxes + k] = static_cast<float>(
            centroid[k] + offset[k] + spec.speaker_spread * rng.Normal());

      UtteranceRecord r;
      r.utterance_key = t.utterance_key;
      r.speaker_id = speaker;
      r.gender = female ? Gender::kFemale : Gender::kMale;
      r.subset = condition == 0 ? "studio" : "home";
      r.session_id = fmt::format("s{}", t.session);
      r.utterance_id = fmt::format("p{:04d}", u);
      r.duration_s = duration;
      r.char_count = char_counts[static_cast<std::size_t>(u)];
      r.snr_db = snr;
      r.f0_hz = f0;

      out.embeddings.Add(t.utterance_key, std::move(v));
      out.records.push_back(std::move(r));
      out.truth.push_back(std::move(t));
    }
  }
  return out;
}

void WriteSynthCorpus(const SynthCorpus &corpus, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
  WriteManifest(corpus.records, dir / "manifest.csv");
  WriteEmbeddings(corpus.embeddings, dir / "embeddings.emb", EmbeddingFormat::kBinary);

  const SynthSpec &spec = corpus.spec;
  const auto dim = static_cast<std::size_t>(spec.dim);
  auto unit = [dim](std::size_t axis) {
    std::vector<int> d(dim, 0);
    d[axis] = 1;
    return d;
  };
  nlohmann::ordered_json truth;
  truth["spec"] = {{"n_speakers", spec.n_speakers},
                   {"utts_per_speaker", spec.utts_per_speaker},
                   {"dim", spec.dim},
                   {"speaker_spread", spec.speaker_spread},
                   {"session_spread", spec.session_spread},
                   {"session_clusters", spec.session_clusters},
                   {"seed", spec.seed}};
  nlohmann::ordered_json factors = nlohmann::ordered_json::object();
  for (SynthFactor f : kSynthFactors)
    factors[std::string(ToString(f))] = {{"axis", Index(f)},
                                         {"leakage", spec.leak(f)},
                                         {"direction", unit(Index(f))}};
  factors["gender"] = {
      {"axis", kGenderAxis}, {"leakage", kGenderLeakage}, {"direction", unit(kGenderAxis)}};
  truth["factors"] = std::move(factors);
  auto utts = nlohmann::ordered_json::array();
  for (const auto &t : corpus.truth) {
    nlohmann::ordered_json raw, z;
    for (SynthFactor f : kSynthFactors) {
      raw[std::string(ToString(f))] = t.raw[Index(f)];
      z[std::string(ToString(f))] = t.z[Index(f)];
    }
    z["gender"] = t.gender_z;
    utts.push_back({{"utterance_key", t.utterance_key},
                    {"session", t.session},
                    {"raw", std::move(raw)},
                    {"z", std::move(z)}});
  }
  truth["utterances"] = std::move(utts);
  std::ofstream out(dir / "truth.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + (dir / "truth.json").string());
  out << truth.dump(1) << '\n';
}

}  // namespace embprobe
