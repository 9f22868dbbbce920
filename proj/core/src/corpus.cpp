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

#include "embprobe/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "csv.hpp"
#include "embprobe/error.hpp"

namespace embprobe {
namespace {

constexpr std::string_view kMagic = "EMB1";

std::string RowContext(const std::string &source, std::size_t line) {
  return fmt::format("{}:{}", source, line);
}

[[noreturn]] void BadValue(const std::string &source, std::size_t line,
                           std::string_view column, std::string_view text) {
  throw Error(ErrorCode::kBadValue,
              fmt::format("{}: column '{}' has invalid value '{}'",
                          RowContext(source, line), column, text));
}

void PutU32(std::ostream &out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void PutU16(std::ostream &out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(bytes, 2);
}

class ByteReader {
 public:
  explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}

  bool Has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint32_t U32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint16_t U16() {
    const auto lo = static_cast<unsigned char>(bytes_[pos_]);
    const auto hi = static_cast<unsigned char>(bytes_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  std::string Bytes(std::size_t n) {
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

EmbeddingSet ReadBinary(std::istream &in, const std::string &architecture,
                        const std::string &source) {
  ByteReader reader(std::string((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>()));
  if (!reader.Has(4) || reader.Bytes(4) != kMagic)
    throw Error(ErrorCode::kBadMagic, source + ": missing EMB1 magic");
  if (!reader.Has(8))
    throw Error(ErrorCode::kBadValue, source + ": truncated header");
  const std::uint32_t dim = reader.U32();
  const std::uint32_t count = reader.U32();
  if (dim == 0) throw Error(ErrorCode::kBadValue, source + ": header dim is 0");

  EmbeddingSet set(architecture, dim);
  for (std::uint32_t r = 0; r < count; ++r) {
    if (!reader.Has(2))
      throw Error(ErrorCode::kBadValue,
                  fmt::format("{}: truncated at record {} of {}", source, r, count));
    const std::uint16_t key_len = reader.U16();
    if (!reader.Has(key_len))
      throw Error(ErrorCode::kBadValue,
                  fmt::format("{}: truncated key in record {}", source, r));
    std::string key = reader.Bytes(key_len);
    if (!reader.Has(std::size_t{dim} * 4))
      throw Error(ErrorCode::kDimMismatch,
                  fmt::format("{}: record '{}' holds {} bytes of values, header dim {} needs {}",
                              source, key, reader.remaining(), dim, std::size_t{dim} * 4));
    std::vector<float> values(dim);
    for (auto &v : values) v = std::bit_cast<float>(reader.U32());
    set.Add(std::move(key), std::move(values));
  }
  if (reader.remaining() != 0)
    throw Error(ErrorCode::kBadValue,
                fmt::format("{}: {} trailing bytes after {} records", source,
                            reader.remaining(), count));
  return set;
}

EmbeddingSet ReadCsv(std::istream &in, const std::string &architecture,
                     const std::string &source) {
  const csv::Table table = csv::Read(in, source);
  if (table.header.empty() || table.header[0] != "utterance_key")
    throw Error(ErrorCode::kMissingColumn, source + ": utterance_key");
  const std::size_t dim = table.header.size() - 1;
  if (dim == 0) throw Error(ErrorCode::kMissingColumn, source + ": v0");
  for (std::size_t i = 0; i < dim; ++i) {
    if (table.header[i + 1] != fmt::format("v{}", i))
      throw Error(ErrorCode::kMissingColumn, fmt::format("{}: v{}", source, i));
  }
  EmbeddingSet set(architecture, dim);
  for (const auto &row : table.rows) {
    const std::string &key = row.fields[0];
    if (row.fields.size() != dim + 1)
      throw Error(ErrorCode::kDimMismatch,
                  fmt::format("{}: record '{}' has {} values, expected {}",
                              RowContext(source, row.line), key, row.fields.size() - 1, dim));
    std::vector<float> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      bool ok = false;
      const double v = csv::ParseDouble(row.fields[i + 1], &ok);
      if (!ok) BadValue(source, row.line, table.header[i + 1], row.fields[i + 1]);
      values[i] = static_cast<float>(v);
    }
    set.Add(key, std::move(values));
  }
  return set;
}

}  // namespace

std::string_view ToString(Gender gender) {
  return gender == Gender::kFemale ? "F" : "M";
}

std::vector<UtteranceRecord> ParseManifest(std::istream &in, const std::string &source) {
  const csv::Table table = csv::Read(in, source);
  std::array<std::size_t, kManifestColumns.size()> col{};
  for (std::size_t c = 0; c < kManifestColumns.size(); ++c) {
    const auto idx = table.Column(kManifestColumns[c]);
    if (!idx)
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("{}: {}", source, kManifestColumns[c]));
    col[c] = *idx;
  }

  std::vector<UtteranceRecord> records;
  records.reserve(table.rows.size());
  std::map<std::string, std::size_t, std::less<>> seen;
  for (const auto &row : table.rows) {
    if (row.fields.size() != table.header.size())
      throw Error(ErrorCode::kBadValue,
                  fmt::format("{}: expected {} fields, found {}", RowContext(source, row.line),
                              table.header.size(), row.fields.size()));
    auto cell = [&](std::size_t c) -> const std::string & { return row.fields[col[c]]; };
    auto name = [&](std::size_t c) { return kManifestColumns[c]; };

    UtteranceRecord rec;
    rec.utterance_key = cell(0);
    if (rec.utterance_key.empty()) BadValue(source, row.line, name(0), "");
    if (auto [it, inserted] = seen.emplace(rec.utterance_key, row.line); !inserted)
      throw Error(ErrorCode::kDuplicateKey,
                  fmt::format("{}: utterance_key '{}' already defined on line {}",
                              RowContext(source, row.line), rec.utterance_key, it->second));
    rec.speaker_id = cell(1);
    if (rec.speaker_id.empty()) BadValue(source, row.line, name(1), "");
    if (cell(2) == "F")
      rec.gender = Gender::kFemale;
    else if (cell(2) == "M")
      rec.gender = Gender::kMale;
    else
      BadValue(source, row.line, name(2), cell(2));
    rec.subset = cell(3);
    if (!cell(4).empty()) rec.session_id = cell(4);
    rec.utterance_id = cell(5);

    bool ok = false;
    rec.duration_s = csv::ParseDouble(cell(6), &ok);
    if (!ok || !std::isfinite(rec.duration_s) || rec.duration_s <= 0.0)
      BadValue(source, row.line, name(6), cell(6));
    const long long chars = csv::ParseInt(cell(7), &ok);
    if (!ok || chars < 0 || chars > 1'000'000'000)
      BadValue(source, row.line, name(7), cell(7));
    rec.char_count = static_cast<int>(chars);
    if (!cell(8).empty()) {
      const double snr = csv::ParseDouble(cell(8), &ok);
      if (!ok || !std::isfinite(snr)) BadValue(source, row.line, name(8), cell(8));
      rec.snr_db = snr;
    }
    if (!cell(9).empty()) {
      const double f0 = csv::ParseDouble(cell(9), &ok);
      if (!ok || !std::isfinite(f0) || f0 <= 0.0) BadValue(source, row.line, name(9), cell(9));
      rec.f0_hz = f0;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<UtteranceRecord> LoadManifest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  return ParseManifest(in, path.string());
}

void WriteManifest(std::span<const UtteranceRecord> records, std::ostream &out) {
  for (std::size_t c = 0; c < kManifestColumns.size(); ++c)
    out << (c ? "," : "") << kManifestColumns[c];
  out << '\n';
  for (const auto &r : records) {
    out << csv::Escape(r.utterance_key) << ',' << csv::Escape(r.speaker_id) << ','
        << ToString(r.gender) << ',' << csv::Escape(r.subset) << ','
        << csv::Escape(r.session_id.value_or("")) << ',' << csv::Escape(r.utterance_id) << ','
        << fmt::format("{}", r.duration_s) << ',' << r.char_count << ','
        << (r.snr_db ? fmt::format("{}", *r.snr_db) : "") << ','
        << (r.f0_hz ? fmt::format("{}", *r.f0_hz) : "") << '\n';
  }
}

void WriteManifest(std::span<const UtteranceRecord> records,
                   const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteManifest(records, out);
}

EmbeddingFormat FormatFromPath(const std::filesystem::path &path) {
  return path.extension() == ".csv" ? EmbeddingFormat::kCsv : EmbeddingFormat::kBinary;
}

EmbeddingSet::EmbeddingSet(std::string architecture, std::size_t dim)
    : architecture_(std::move(architecture)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kDimMismatch, "embedding dim must be positive");
}

void EmbeddingSet::Add(std::string key, std::vector<float> values) {
  if (values.size() != dim_)
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("'{}' has {} values, expected {}", key, values.size(), dim_));
  for (float v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, fmt::format("'{}'", key));
  if (key.size() > 0xffff)
    throw Error(ErrorCode::kBadValue, "utterance key longer than 65535 bytes");
  if (index_.contains(key))
    throw Error(ErrorCode::kDuplicateKey, fmt::format("embedding '{}'", key));
  index_.emplace(key, entries_.size());
  entries_.push_back({std::move(key), std::move(values)});
}

const std::vector<float> *EmbeddingSet::Find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  return it == index_.end() ? nullptr : &entries_[it->second].values;
}

EmbeddingSet ReadEmbeddings(std::istream &in, EmbeddingFormat format,
                            const std::string &architecture, const std::string &source) {
  EmbeddingSet set = format == EmbeddingFormat::kBinary
                         ? ReadBinary(in, architecture, source)
                         : ReadCsv(in, architecture, source);
  if (set.empty()) throw Error(ErrorCode::kBadValue, source + ": no embeddings");
  return set;
}

EmbeddingSet LoadEmbeddings(const std::filesystem::path &path, EmbeddingFormat format,
                            std::optional<std::string> architecture) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open embeddings " + path.string());
  return ReadEmbeddings(in, format, architecture.value_or(path.stem().string()),
                        path.string());
}

void WriteEmbeddings(const EmbeddingSet &set, std::ostream &out, EmbeddingFormat format) {
  if (format == EmbeddingFormat::kBinary) {
    out.write(kMagic.data(), kMagic.size());
    PutU32(out, static_cast<std::uint32_t>(set.dim()));
    PutU32(out, static_cast<std::uint32_t>(set.size()));
    for (const auto &e : set.entries()) {
      PutU16(out, static_cast<std::uint16_t>(e.key.size()));
      out.write(e.key.data(), static_cast<std::streamsize>(e.key.size()));
      for (float v : e.values) PutU32(out, std::bit_cast<std::uint32_t>(v));
    }
    return;
  }
  out << "utterance_key";
  for (std::size_t i = 0; i < set.dim(); ++i) out << ",v" << i;
  out << '\n';
  for (const auto &e : set.entries()) {
    out << csv::Escape(e.key);
    for (float v : e.values) out << ',' << fmt::format("{}", v);
    out << '\n';
  }
}

void WriteEmbeddings(const EmbeddingSet &set, const std::filesystem::path &path,
                     EmbeddingFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteEmbeddings(set, out, format);
}

std::optional<std::size_t> EvaluationDataset::SpeakerOrdinal(std::string_view speaker_id) const {
  auto it = std::lower_bound(speakers_.begin(), speakers_.end(), speaker_id);
  if (it == speakers_.end() || *it != speaker_id) return std::nullopt;
  return static_cast<std::size_t>(it - speakers_.begin());
}

std::optional<std::size_t> EvaluationDataset::IndexOfKey(std::string_view key) const {
  auto it = key_index_.find(key);
  if (it == key_index_.end()) return std::nullopt;
  return it->second;
}

EvaluationDataset BuildDataset(std::vector<UtteranceRecord> records,
                               const EmbeddingSet &embeddings) {
  std::sort(records.begin(), records.end(),
            [](const UtteranceRecord &a, const UtteranceRecord &b) {
              return a.utterance_key < b.utterance_key;
            });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].utterance_key == records[i - 1].utterance_key)
      throw Error(ErrorCode::kDuplicateKey, records[i].utterance_key);

  EvaluationDataset ds;
  ds.architecture_ = embeddings.architecture();
  ds.embeddings_ = Matrix(records.size(), embeddings.dim());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto *values = embeddings.Find(records[i].utterance_key);
    if (values == nullptr)
      throw Error(ErrorCode::kMissingEmbedding,
                  fmt::format("utterance '{}' has no embedding in '{}'",
                              records[i].utterance_key, embeddings.architecture()));
    std::copy(values->begin(), values->end(), ds.embeddings_.row(i).begin());
    ds.key_index_.emplace(records[i].utterance_key, i);
  }
  // Every record found an embedding and keys are unique on both sides, so a
  // size difference means orphans.
  if (embeddings.size() != records.size()) {
    std::vector<std::string> orphans;
    for (const auto &e : embeddings.entries())
      if (!ds.key_index_.contains(e.key)) orphans.push_back(e.key);
    std::sort(orphans.begin(), orphans.end());
    throw Error(ErrorCode::kOrphanEmbedding,
                fmt::format("embedding '{}' in '{}' has no manifest record ({} total)",
                            orphans.front(), embeddings.architecture(), orphans.size()));
  }

  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_speaker[records[i].speaker_id].push_back(i);
  ds.speaker_of_.resize(records.size());
  for (auto &[speaker, rows] : by_speaker) {
    if (rows.size() < 2)
      throw Error(ErrorCode::kSingletonSpeaker,
                  fmt::format("speaker '{}' has only one utterance", speaker));
    for (std::size_t r : rows) {
      if (records[r].gender != records[rows.front()].gender)
        throw Error(ErrorCode::kBadValue,
                    fmt::format("speaker '{}' has utterances with different genders", speaker));
      ds.speaker_of_[r] = ds.speakers_.size();
    }
    ds.speakers_.push_back(speaker);
    ds.speaker_rows_.push_back(std::move(rows));
  }
  ds.records_ = std::move(records);
  return ds;
}

}  // namespace embprobe
