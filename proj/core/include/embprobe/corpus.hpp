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

#ifndef EMBPROBE_CORPUS_HPP_
#define EMBPROBE_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embprobe/matrix.hpp"

namespace embprobe {

enum class Gender { kFemale, kMale };

std::string_view ToString(Gender gender);  // "F" / "M"

/// One manifest row: the metadata probed for residual information.
struct UtteranceRecord {
  std::string utterance_key;
  std::string speaker_id;
  Gender gender = Gender::kFemale;
  std::string subset;
  std::optional<std::string> session_id;
  std::string utterance_id;  // prompt identifier shared across speakers
  double duration_s = 0.0;
  int char_count = 0;
  std::optional<double> snr_db;
  std::optional<double> f0_hz;

  bool operator==(const UtteranceRecord &) const = default;
};

inline constexpr std::array<std::string_view, 10> kManifestColumns = {
    "utterance_key", "speaker_id", "gender",     "subset",  "session_id",
    "utterance_id",  "duration_s", "char_count", "snr_db",  "f0_hz"};

// Reads the manifest CSV. Columns are located by header name; every column in
// kManifestColumns must be present. Empty optional cells become nullopt.
std::vector<UtteranceRecord> LoadManifest(const std::filesystem::path &path);
std::vector<UtteranceRecord> ParseManifest(std::istream &in, const std::string &source);

void WriteManifest(std::span<const UtteranceRecord> records, std::ostream &out);
void WriteManifest(std::span<const UtteranceRecord> records,
                   const std::filesystem::path &path);

enum class EmbeddingFormat { kBinary, kCsv };

// ".csv" -> kCsv, anything else -> kBinary.
EmbeddingFormat FormatFromPath(const std::filesystem::path &path);

struct EmbeddingEntry {
  std::string key;
  std::vector<float> values;

  bool operator==(const EmbeddingEntry &) const = default;
};

/// A named architecture's utterance-key -> vector map. Entries keep their
/// insertion order so that writing a loaded file reproduces it exactly.
class EmbeddingSet {
 public:
  EmbeddingSet(std::string architecture, std::size_t dim);

  // Throws DimMismatch, NonFinite or DuplicateKey.
  void Add(std::string key, std::vector<float> values);

  const std::string &architecture() const noexcept { return architecture_; }
  void set_architecture(std::string name) { architecture_ = std::move(name); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<EmbeddingEntry> &entries() const noexcept { return entries_; }

  const std::vector<float> *Find(std::string_view key) const;

  bool operator==(const EmbeddingSet &other) const {
    return architecture_ == other.architecture_ && dim_ == other.dim_ &&
           entries_ == other.entries_;
  }

 private:
  std::string architecture_;
  std::size_t dim_;
  std::vector<EmbeddingEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Loads an embedding file. The architecture name defaults to the file stem.
EmbeddingSet LoadEmbeddings(const std::filesystem::path &path, EmbeddingFormat format,
                            std::optional<std::string> architecture = std::nullopt);
EmbeddingSet ReadEmbeddings(std::istream &in, EmbeddingFormat format,
                            const std::string &architecture, const std::string &source);

void WriteEmbeddings(const EmbeddingSet &set, std::ostream &out, EmbeddingFormat format);
void WriteEmbeddings(const EmbeddingSet &set, const std::filesystem::path &path,
                     EmbeddingFormat format);

/// Manifest joined with one architecture's embeddings. Records are held in
/// utterance-key order regardless of input order, so permuted inputs build
/// equal datasets. Immutable once built.
class EvaluationDataset {
 public:
  const std::string &architecture() const noexcept { return architecture_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::size_t dim() const noexcept { return embeddings_.cols(); }

  const std::vector<UtteranceRecord> &records() const noexcept { return records_; }
  const UtteranceRecord &record(std::size_t i) const { return records_[i]; }
  const Matrix &embeddings() const noexcept { return embeddings_; }
  std::span<const double> embedding(std::size_t i) const { return embeddings_.row(i); }

  // Sorted speaker ids.
  const std::vector<std::string> &speakers() const noexcept { return speakers_; }
  // Ordinal into speakers() of row i.
  std::size_t speaker_of(std::size_t i) const { return speaker_of_[i]; }
  // Row indices (ascending) of the given speaker ordinal.
  std::span<const std::size_t> utterances_of(std::size_t speaker) const {
    return speaker_rows_[speaker];
  }
  std::optional<std::size_t> SpeakerOrdinal(std::string_view speaker_id) const;
  std::optional<std::size_t> IndexOfKey(std::string_view key) const;

  bool operator==(const EvaluationDataset &other) const {
    return architecture_ == other.architecture_ && records_ == other.records_ &&
           embeddings_ == other.embeddings_;
  }

  friend EvaluationDataset BuildDataset(std::vector<UtteranceRecord> records,
                                        const EmbeddingSet &embeddings);

 private:
  std::string architecture_;
  std::vector<UtteranceRecord> records_;
  Matrix embeddings_;
  std::vector<std::string> speakers_;
  std::vector<std::size_t> speaker_of_;
  std::vector<std::vector<std::size_t>> speaker_rows_;
  std::map<std::string, std::size_t, std::less<>> key_index_;
};

// Joins on utterance_key. Throws MissingEmbedding, OrphanEmbedding,
// SingletonSpeaker, DuplicateKey, or BadValue (speaker with mixed gender).
EvaluationDataset BuildDataset(std::vector<UtteranceRecord> records,
                               const EmbeddingSet &embeddings);

}  // namespace embprobe

#endif  // EMBPROBE_CORPUS_HPP_
