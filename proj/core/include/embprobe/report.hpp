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

#ifndef EMBPROBE_REPORT_HPP_
#define EMBPROBE_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embprobe/probes.hpp"
#include "embprobe/projection.hpp"
#include "embprobe/simmetrics.hpp"

namespace embprobe {

struct ProjectionInfo {
  std::string scope;  // "global" or a speaker id
  std::string csv;    // paths relative to the architecture directory
  std::string svg;

  bool operator==(const ProjectionInfo &) const = default;
};

// Everything computed for one embedding architecture. Sections left empty
// are omitted from the report.
struct ArchitectureResults {
  std::string architecture;
  std::vector<GroupValue> eer;
  std::vector<GroupValue> intra;
  std::vector<GroupValue> inter;
  std::vector<SpeakerPair> closest_pairs;
  std::vector<ProbeResult> probes;
  std::vector<ProjectionInfo> projections;
  std::vector<std::string> warnings;
};

// Lossless round trip through the per-architecture results.json.
void WriteResults(const ArchitectureResults &results, const std::filesystem::path &path);
ArchitectureResults ReadResults(const std::filesystem::path &path);

struct Column {
  std::string name;
  Direction direction = Direction::kLowerBetter;
  int precision = 3;
};

struct TableRow {
  std::string architecture;
  std::vector<std::optional<double>> values;  // one per column
};

struct Table {
  std::string id;     // file stem, e.g. "table1_eer"
  std::string title;
  std::vector<Column> columns;
  std::vector<TableRow> rows;
};

// Fixed-point text; "" for a missing value. Negative zero prints unsigned.
std::string FormatCell(std::optional<double> value, int precision);

// The value as printed, parsed back.
std::optional<double> RoundedCell(std::optional<double> value, int precision);

// "arch,v1,v2,..."
std::string RenderCsvRow(const Table &table, std::size_t row);
// "arch v1 v2 ..."
std::string RenderTextRow(const Table &table, std::size_t row);

// best[row][col] is true where the printed value equals the column optimum
// for the column's direction.
std::vector<std::vector<bool>> BestMarkers(const Table &table);

// Group columns are the union over architectures: all, female, male, then
// sorted subset labels. Probe columns follow the canonical task order.
std::vector<Table> BuildTables(const std::vector<ArchitectureResults> &results);

// Writes report.json, report.md, one CSV per table and probes.csv.
// Throws EmptyReport when there is nothing to report.
void EmitReport(const std::vector<ArchitectureResults> &results,
                const std::filesystem::path &out_dir);

// CSV with a header row of speaker ids; empty cells for missing pairs.
void WriteSimilarityMatrix(const SimilarityMatrix &matrix, const std::filesystem::path &path);

// One circle per point, coloured by label through a hash-based palette, a
// legend of sorted labels, and a viewBox fitted to the data with 5% margin.
// Throws EmptyReport for an empty projection and LabelMissing(key).
void EmitScatterSvg(const Projection &projection,
                    const std::map<std::string, std::string> &labels,
                    const std::filesystem::path &path, const std::string &title = {});
std::string RenderScatterSvg(const Projection &projection,
                             const std::map<std::string, std::string> &labels,
                             const std::string &title = {});

}  // namespace embprobe

#endif  // EMBPROBE_REPORT_HPP_
