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

#ifndef EMBPROBE_TESTS_FIXTURES_HPP_
#define EMBPROBE_TESTS_FIXTURES_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "embprobe/corpus.hpp"

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "embprobe-XXXXXX").string();
    path_ = mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void WriteFile(const std::filesystem::path &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline embprobe::UtteranceRecord Record(const std::string &key, const std::string &speaker,
                                        embprobe::Gender gender = embprobe::Gender::kFemale,
                                        const std::string &subset = "a") {
  embprobe::UtteranceRecord r;
  r.utterance_key = key;
  r.speaker_id = speaker;
  r.gender = gender;
  r.subset = subset;
  r.utterance_id = key;
  r.duration_s = 1.0;
  r.char_count = 10;
  return r;
}

struct Speaker {
  std::string id;
  embprobe::Gender gender = embprobe::Gender::kFemale;
  std::string subset = "a";
  std::vector<std::vector<float>> vectors;
};

// Keys are "<speaker>_<index>".
inline embprobe::EvaluationDataset MakeDataset(const std::vector<Speaker> &speakers,
                                               const std::string &architecture = "arch") {
  std::vector<embprobe::UtteranceRecord> records;
  embprobe::EmbeddingSet set(architecture, speakers.front().vectors.front().size());
  for (const auto &s : speakers)
    for (std::size_t i = 0; i < s.vectors.size(); ++i) {
      const std::string key = s.id + "_" + std::to_string(i);
      records.push_back(Record(key, s.id, s.gender, s.subset));
      set.Add(key, s.vectors[i]);
    }
  return embprobe::BuildDataset(std::move(records), set);
}

}  // namespace testing_support

#endif  // EMBPROBE_TESTS_FIXTURES_HPP_
