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

#ifndef EMBPROBE_SRC_CSV_HPP_
#define EMBPROBE_SRC_CSV_HPP_

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace embprobe::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number of the row in its source
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of a header column, if present.
  std::optional<std::size_t> Column(std::string_view name) const;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks. CRLF line endings are accepted; blank lines are skipped.
Table Read(std::istream &in, const std::string &source);
Table ReadFile(const std::filesystem::path &path);

// Quotes a field only when it needs it.
std::string Escape(std::string_view field);

double ParseDouble(std::string_view text, bool *ok);
long long ParseInt(std::string_view text, bool *ok);

}  // namespace embprobe::csv

#endif  // EMBPROBE_SRC_CSV_HPP_
