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

#include "embprobe/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "embprobe/error.hpp"

namespace embprobe {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kSimilarityPrecision = 3;
constexpr int kEerPrecision = 3;
constexpr int kSrccPrecision = 3;
constexpr int kF1Precision = 2;
constexpr int kFineF1Precision = 3;  // char_count F1 lives near zero
constexpr int kMsePrecision = 3;

Json ToJson(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> OptionalDouble(const Json &j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json GroupValuesToJson(const std::vector<GroupValue> &values) {
  Json arr = Json::array();
  for (const auto &v : values) arr.push_back({{"group", v.group}, {"value", ToJson(v.value)}});
  return arr;
}

std::vector<GroupValue> GroupValuesFromJson(const Json &j) {
  std::vector<GroupValue> out;
  for (const auto &e : j) out.push_back({e.at("group").get<std::string>(), OptionalDouble(e.at("value"))});
  return out;
}

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::vector<std::string> GroupColumns(const std::vector<ArchitectureResults> &results,
                                      std::vector<GroupValue> ArchitectureResults::*section) {
  static const std::vector<std::string> kLeading = {"all", "female", "male"};
  std::set<std::string> seen, rest;
  for (const auto &r : results)
    for (const auto &v : r.*section) seen.insert(v.group);
  std::vector<std::string> cols;
  for (const auto &name : kLeading)
    if (seen.count(name)) cols.push_back(name);
  for (const auto &name : seen)
    if (std::find(kLeading.begin(), kLeading.end(), name) == kLeading.end()) rest.insert(name);
  cols.insert(cols.end(), rest.begin(), rest.end());
  return cols;
}

std::optional<Table> GroupTable(const std::vector<ArchitectureResults> &results,
                                std::vector<GroupValue> ArchitectureResults::*section,
                                std::string id, std::string title, Direction direction,
                                int precision) {
  const auto names = GroupColumns(results, section);
  if (names.empty()) return std::nullopt;
  Table t{std::move(id), std::move(title), {}, {}};
  for (const auto &n : names) t.columns.push_back({n, direction, precision});
  for (const auto &r : results) {
    if ((r.*section).empty()) continue;
    TableRow row{r.architecture, std::vector<std::optional<double>>(names.size())};
    for (const auto &v : r.*section) {
      const auto it = std::find(names.begin(), names.end(), v.group);
      row.values[static_cast<std::size_t>(it - names.begin())] = v.value;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

int ProbePrecision(const ProbeTask &task) {
  if (task.kind == ProbeKind::kRegression) return kSrccPrecision;
  return task.target == ProbeTarget::kCharCount ? kFineF1Precision : kF1Precision;
}

std::optional<Table> ProbeTable(const std::vector<ArchitectureResults> &results, ProbeKind kind,
                                std::string id, std::string title) {
  std::vector<ProbeTask> tasks;
  for (const auto &task : CanonicalTasks()) {
    if (task.kind != kind) continue;
    const bool present = std::any_of(results.begin(), results.end(), [&](const auto &r) {
      return std::any_of(r.probes.begin(), r.probes.end(),
                         [&](const ProbeResult &p) { return p.task.target == task.target; });
    });
    if (present) tasks.push_back(task);
  }
  if (tasks.empty()) return std::nullopt;
  Table t{std::move(id), std::move(title), {}, {}};
  for (const auto &task : tasks) t.columns.push_back({task.name, task.direction, ProbePrecision(task)});
  for (const auto &r : results) {
    TableRow row{r.architecture, std::vector<std::optional<double>>(tasks.size())};
    bool any = false;
    for (const auto &p : r.probes)
      for (std::size_t c = 0; c < tasks.size(); ++c)
        if (p.task.target == tasks[c].target) {
          row.values[c] = p.score;
          any = true;
        }
    if (any) t.rows.push_back(std::move(row));
  }
  return t;
}

std::string_view Arrow(Direction d) { return d == Direction::kHigherBetter ? "↑" : "↓"; }

std::string RenderMarkdown(const std::vector<Table> &tables,
                           const std::vector<ArchitectureResults> &results) {
  std::ostringstream md;
  md << "# Embedding evaluation report\n";
  for (const auto &t : tables) {
    const auto best = BestMarkers(t);
    md << "\n## " << t.title << "\n\n| architecture |";
    for (const auto &c : t.columns) md << ' ' << c.name << ' ' << Arrow(c.direction) << " |";
    md << "\n|---|";
    for (std::size_t c = 0; c < t.columns.size(); ++c) md << "---:|";
    md << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      md << "| " << t.rows[r].architecture << " |";
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        const std::string cell = FormatCell(t.rows[r].values[c], t.columns[c].precision);
        md << ' ' << (best[r][c] ? "**" + cell + "**" : cell) << " |";
      }
      md << '\n';
    }
  }
  for (const auto &r : results) {
    if (r.closest_pairs.empty() && r.warnings.empty()) continue;
    md << "\n## " << r.architecture << "\n";
    if (!r.closest_pairs.empty()) {
      md << "\nClosest speaker pairs:\n\n";
      for (const auto &p : r.closest_pairs) md << "- " << FormatSpeakerPair(p) << '\n';
    }
    if (!r.warnings.empty()) {
      md << "\nWarnings:\n\n";
      for (const auto &w : r.warnings) md << "- " << w << '\n';
    }
  }
  return md.str();
}

std::optional<double> F0Mse(const ArchitectureResults &r) {
  for (const auto &p : r.probes)
    if (p.task.target == ProbeTarget::kF0 && p.mse) return p.mse;
  return std::nullopt;
}

}  // namespace

void WriteResults(const ArchitectureResults &results, const std::filesystem::path &path) {
  Json j;
  j["architecture"] = results.architecture;
  j["eer"] = GroupValuesToJson(results.eer);
  j["intra"] = GroupValuesToJson(results.intra);
  j["inter"] = GroupValuesToJson(results.inter);
  Json pairs = Json::array();
  for (const auto &p : results.closest_pairs)
    pairs.push_back({{"first", p.first}, {"second", p.second}, {"similarity", p.similarity}});
  j["closest_pairs"] = std::move(pairs);
  Json probes = Json::array();
  for (const auto &p : results.probes)
    probes.push_back({{"task", p.task.name},
                      {"metric", p.metric},
                      {"score", p.score},
                      {"mse", ToJson(p.mse)}});
  j["probes"] = std::move(probes);
  Json projections = Json::array();
  for (const auto &p : results.projections)
    projections.push_back({{"scope", p.scope}, {"csv", p.csv}, {"svg", p.svg}});
  j["projections"] = std::move(projections);
  j["warnings"] = results.warnings;
  WriteText(path, j.dump(2) + "\n");
}

ArchitectureResults ReadResults(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
    ArchitectureResults r;
    r.architecture = j.at("architecture").get<std::string>();
    r.eer = GroupValuesFromJson(j.at("eer"));
    r.intra = GroupValuesFromJson(j.at("intra"));
    r.inter = GroupValuesFromJson(j.at("inter"));
    for (const auto &p : j.at("closest_pairs"))
      r.closest_pairs.push_back({p.at("first").get<std::string>(),
                                 p.at("second").get<std::string>(),
                                 p.at("similarity").get<double>()});
    for (const auto &p : j.at("probes")) {
      const auto name = p.at("task").get<std::string>();
      const auto target = TargetFromName(name);
      if (!target) throw Error(ErrorCode::kBadValue, path.string() + ": unknown task " + name);
      r.probes.push_back({TaskFor(*target), p.at("metric").get<std::string>(),
                          p.at("score").get<double>(), OptionalDouble(p.at("mse"))});
    }
    for (const auto &p : j.at("projections"))
      r.projections.push_back({p.at("scope").get<std::string>(), p.at("csv").get<std::string>(),
                               p.at("svg").get<std::string>()});
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kBadValue, path.string() + ": " + e.what());
  }
}

std::string FormatCell(std::optional<double> value, int precision) {
  if (!value) return {};
  std::string s = fmt::format("{:.{}f}", *value, precision);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::optional<double> RoundedCell(std::optional<double> value, int precision) {
  if (!value) return std::nullopt;
  bool ok = false;
  const double v = csv::ParseDouble(FormatCell(value, precision), &ok);
  return ok ? std::optional<double>(v) : value;
}

std::string RenderCsvRow(const Table &table, std::size_t row) {
  const auto &r = table.rows.at(row);
  std::string out = csv::Escape(r.architecture);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out += "," + FormatCell(r.values[c], table.columns[c].precision);
  return out;
}

std::string RenderTextRow(const Table &table, std::size_t row) {
  const auto &r = table.rows.at(row);
  std::string out = r.architecture;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const std::string cell = FormatCell(r.values[c], table.columns[c].precision);
    out += " " + (cell.empty() ? std::string("-") : cell);
  }
  return out;
}

std::vector<std::vector<bool>> BestMarkers(const Table &table) {
  std::vector<std::vector<bool>> best(table.rows.size(),
                                      std::vector<bool>(table.columns.size(), false));
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto &col = table.columns[c];
    std::optional<double> target;
    for (const auto &row : table.rows) {
      const auto v = RoundedCell(row.values[c], col.precision);
      if (!v) continue;
      if (!target || (col.direction == Direction::kHigherBetter ? *v > *target : *v < *target))
        target = v;
    }
    if (!target) continue;
    for (std::size_t r = 0; r < table.rows.size(); ++r)
      best[r][c] = RoundedCell(table.rows[r].values[c], col.precision) == target;
  }
  return best;
}

std::vector<Table> BuildTables(const std::vector<ArchitectureResults> &results) {
  std::vector<Table> tables;
  auto add = [&](std::optional<Table> t) {
    if (t && !t->rows.empty()) tables.push_back(std::move(*t));
  };
  add(GroupTable(results, &ArchitectureResults::eer, "table1_eer", "Equal error rate",
                 Direction::kLowerBetter, kEerPrecision));
  add(GroupTable(results, &ArchitectureResults::intra, "table2_intra",
                 "Intra-speaker cosine similarity", Direction::kHigherBetter,
                 kSimilarityPrecision));
  add(GroupTable(results, &ArchitectureResults::inter, "table3_inter",
                 "Inter-speaker cosine similarity", Direction::kLowerBetter,
                 kSimilarityPrecision));
  add(ProbeTable(results, ProbeKind::kClassification, "table4_classification",
                 "Classification probes (macro-F1)"));
  add(ProbeTable(results, ProbeKind::kRegression, "table5_regression",
                 "Regression probes (SRCC)"));
  return tables;
}

void EmitReport(const std::vector<ArchitectureResults> &results,
                const std::filesystem::path &out_dir) {
  const auto tables = BuildTables(results);
  if (tables.empty()) throw Error(ErrorCode::kEmptyReport, "no result sections to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string());

  // Per-architecture view of the rounded table cells.
  Json archs = Json::array();
  for (const auto &r : results) {
    Json a;
    a["architecture"] = r.architecture;
    for (const auto &t : tables) {
      const auto row = std::find_if(t.rows.begin(), t.rows.end(),
                                    [&](const TableRow &tr) { return tr.architecture == r.architecture; });
      if (row == t.rows.end()) continue;
      Json cells;
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        cells[t.columns[c].name] = ToJson(RoundedCell(row->values[c], t.columns[c].precision));
      a[t.id] = std::move(cells);
    }
    if (const auto mse = F0Mse(r)) {
      a["f0_mse_hz2"] = ToJson(RoundedCell(*mse, kMsePrecision));
      a["f0_rmse_hz"] = ToJson(RoundedCell(std::sqrt(*mse), kMsePrecision));
    }
    Json pairs = Json::array();
    for (const auto &p : r.closest_pairs) pairs.push_back(FormatSpeakerPair(p));
    a["closest_pairs"] = std::move(pairs);
    Json projections = Json::array();
    for (const auto &p : r.projections)
      projections.push_back({{"scope", p.scope}, {"csv", r.architecture + "/" + p.csv},
                             {"svg", r.architecture + "/" + p.svg}});
    a["projections"] = std::move(projections);
    a["warnings"] = r.warnings;
    archs.push_back(std::move(a));
  }

  Json table_meta = Json::array();
  for (const auto &t : tables) {
    const auto best = BestMarkers(t);
    Json cols = Json::array();
    for (const auto &c : t.columns)
      cols.push_back({{"name", c.name}, {"direction", ToString(c.direction)}, {"precision", c.precision}});
    Json rows = Json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Json values = Json::array();
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        values.push_back(ToJson(RoundedCell(t.rows[r].values[c], t.columns[c].precision)));
      rows.push_back({{"architecture", t.rows[r].architecture},
                      {"values", std::move(values)},
                      {"best", best[r]}});
    }
    table_meta.push_back({{"id", t.id}, {"title", t.title}, {"columns", std::move(cols)},
                          {"rows", std::move(rows)}});
  }
  Json report;
  report["architectures"] = std::move(archs);
  report["tables"] = std::move(table_meta);
  WriteText(out_dir / "report.json", report.dump(2) + "\n");

  for (const auto &t : tables) {
    std::string text = "arch";
    for (const auto &c : t.columns) text += "," + csv::Escape(c.name);
    text += "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) text += RenderCsvRow(t, r) + "\n";
    WriteText(out_dir / (t.id + ".csv"), text);
  }

  std::string probes = "arch,task,kind,metric,score,direction,mse\n";
  bool any_probe = false;
  for (const auto &r : results)
    for (const auto &p : r.probes) {
      any_probe = true;
      probes += fmt::format("{},{},{},{},{},{},{}\n", csv::Escape(r.architecture), p.task.name,
                            ToString(p.task.kind), p.metric,
                            FormatCell(p.score, ProbePrecision(p.task)),
                            ToString(p.task.direction), FormatCell(p.mse, kMsePrecision));
    }
  if (any_probe) WriteText(out_dir / "probes.csv", probes);

  WriteText(out_dir / "report.md", RenderMarkdown(tables, results));
}

void WriteSimilarityMatrix(const SimilarityMatrix &matrix, const std::filesystem::path &path) {
  std::string text = "speaker";
  for (const auto &s : matrix.speakers) text += "," + csv::Escape(s);
  text += "\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    text += csv::Escape(matrix.speakers[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j)
      text += "," + FormatCell(matrix.at(i, j), kSimilarityPrecision);
    text += "\n";
  }
  WriteText(path, text);
}

}  // namespace embprobe
