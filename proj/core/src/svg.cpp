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

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "embprobe/error.hpp"
#include "embprobe/report.hpp"
#include "embprobe/rng.hpp"

namespace embprobe {
namespace {

constexpr std::array<const char *, 20> kPalette = {
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728",
    "#ff9896", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2",
    "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};

std::string ColorFor(const std::string &label) {
  return kPalette[StableHash(label) % kPalette.size()];
}

std::string XmlEscape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  std::string s = fmt::format("{:.4f}", v);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

}  // namespace

std::string RenderScatterSvg(const Projection &projection,
                             const std::map<std::string, std::string> &labels,
                             const std::string &title) {
  const std::size_t n = projection.keys.size();
  if (n == 0) throw Error(ErrorCode::kEmptyReport, "projection has no points");
  std::vector<const std::string *> point_labels(n);
  std::set<std::string> distinct;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = labels.find(projection.keys[i]);
    if (it == labels.end()) throw Error(ErrorCode::kLabelMissing, projection.keys[i]);
    point_labels[i] = &it->second;
    distinct.insert(it->second);
  }

  // SVG y grows downwards; plot -y so the picture matches the usual axes.
  double min_x = projection.coords(0, 0), max_x = min_x;
  double min_y = -projection.coords(0, 1), max_y = min_y;
  for (std::size_t i = 1; i < n; ++i) {
    min_x = std::min(min_x, projection.coords(i, 0));
    max_x = std::max(max_x, projection.coords(i, 0));
    min_y = std::min(min_y, -projection.coords(i, 1));
    max_y = std::max(max_y, -projection.coords(i, 1));
  }
  double w = max_x - min_x, h = max_y - min_y;
  if (w <= 0.0) w = 1.0;
  if (h <= 0.0) h = 1.0;
  const double vx = min_x - 0.05 * w, vy = min_y - 0.05 * h;
  const double vw = 1.1 * w, vh = 1.1 * h;
  const double extent = std::max(vw, vh);
  const double radius = 0.006 * extent;
  const double font = 0.025 * extent;

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" "
      "height=\"{}\">\n",
      Num(vx), Num(vy), Num(vw), Num(vh), static_cast<int>(800.0 * vh / vw + 0.5));
  if (!title.empty()) out += "<title>" + XmlEscape(title) + "</title>\n";
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
                     Num(vx), Num(vy), Num(vw), Num(vh));
  out += "<g class=\"points\">\n";
  for (std::size_t i = 0; i < n; ++i)
    out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"><title>{}</title></circle>\n",
                       Num(projection.coords(i, 0)), Num(-projection.coords(i, 1)), Num(radius),
                       ColorFor(*point_labels[i]), XmlEscape(projection.keys[i]));
  out += "</g>\n<g class=\"legend\">\n";
  double y = vy + 1.5 * font;
  for (const auto &label : distinct) {
    out += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>"
        "<text x=\"{}\" y=\"{}\" font-size=\"{}\">{}</text>\n",
        Num(vx + font), Num(y - 0.8 * font), Num(0.8 * font), Num(0.8 * font), ColorFor(label),
        Num(vx + 2.2 * font), Num(y), Num(font), XmlEscape(label));
    y += 1.3 * font;
  }
  out += "</g>\n</svg>\n";
  return out;
}

void EmitScatterSvg(const Projection &projection,
                    const std::map<std::string, std::string> &labels,
                    const std::filesystem::path &path, const std::string &title) {
  const std::string svg = RenderScatterSvg(projection, labels, title);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << svg;
}

}  // namespace embprobe
