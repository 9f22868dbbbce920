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

#include "embprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "embprobe/error.hpp"

namespace embprobe {

double F1Macro(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} true labels vs {} predictions", y_true.size(), y_pred.size()));
  struct Counts {
    std::size_t tp = 0, predicted = 0, actual = 0;
  };
  std::map<int, Counts> per_class;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++per_class[y_true[i]].actual;
    ++per_class[y_pred[i]].predicted;
    if (y_true[i] == y_pred[i]) ++per_class[y_true[i]].tp;
  }
  double sum = 0.0;
  for (const auto &[label, c] : per_class) {
    // 2PR/(P+R) reduces to 2TP / (predicted + actual).
    if (c.tp == 0) continue;
    sum += 2.0 * static_cast<double>(c.tp) / static_cast<double>(c.predicted + c.actual);
  }
  return sum / static_cast<double>(per_class.size());
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Srcc(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.size() < 2)
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("SRCC needs two equal-length series of >= 2 values, got {} and {}",
                            y_true.size(), y_pred.size()));
  const auto rx = AverageRanks(y_true);
  const auto ry = AverageRanks(y_pred);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error(ErrorCode::kZeroVariance, "all ranks tied in one argument");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double MeanSquaredError(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw Error(ErrorCode::kLengthMismatch, "MSE needs equal-length non-empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    sum += d * d;
  }
  return sum / static_cast<double>(y_true.size());
}

}  // namespace embprobe
