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

// Slow reference implementations used to cross-check the library.

#ifndef EMBPROBE_TESTS_ORACLES_HPP_
#define EMBPROBE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

struct SweepPoint {
  double threshold;
  double far;
  double frr;
};

// FAR/FRR counted directly at every distinct score and at +inf.
inline std::vector<SweepPoint> ThresholdSweep(const std::vector<double> &same,
                                              const std::vector<double> &diff) {
  std::set<double> candidates(same.begin(), same.end());
  candidates.insert(diff.begin(), diff.end());
  candidates.insert(std::numeric_limits<double>::infinity());
  std::vector<SweepPoint> out;
  for (double t : candidates) {
    double accepted = 0, rejected = 0;
    for (double d : diff) accepted += d >= t ? 1 : 0;
    for (double s : same) rejected += s < t ? 1 : 0;
    out.push_back({t, accepted / static_cast<double>(diff.size()),
                   rejected / static_cast<double>(same.size())});
  }
  return out;
}

struct EerPoint {
  double eer;
  double threshold;
};

// First sweep point with FAR == FRR, else the crossing of the two piecewise
// linear curves between the bracketing points.
inline EerPoint BruteForceEer(const std::vector<double> &same, const std::vector<double> &diff) {
  const auto sweep = ThresholdSweep(same, diff);
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto &p = sweep[k];
    if (p.far == p.frr) return {p.far, p.threshold};
    if (p.far < p.frr) {
      const auto &q = sweep[k - 1];
      const double a = (q.far - q.frr) / ((q.far - q.frr) - (p.far - p.frr));
      const double far = q.far + a * (p.far - q.far);
      const double frr = q.frr + a * (p.frr - q.frr);
      const double t = std::isinf(p.threshold) ? q.threshold
                                               : q.threshold + a * (p.threshold - q.threshold);
      return {(far + frr) / 2.0, t};
    }
  }
  return {std::numeric_limits<double>::quiet_NaN(), 0.0};
}

// Rank of each value: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> Ranks(const std::vector<double> &v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i] ? 1 : 0;
      equal += w == v[i] ? 1 : 0;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double Pearson(const std::vector<double> &a, const std::vector<double> &b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double Spearman(const std::vector<double> &a, const std::vector<double> &b) {
  return Pearson(Ranks(a), Ranks(b));
}

// Macro-F1 from an explicit confusion table.
inline double MacroF1(const std::vector<int> &truth, const std::vector<int> &pred) {
  std::map<std::pair<int, int>, double> confusion;
  std::set<int> classes;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    confusion[{truth[i], pred[i]}] += 1;
    classes.insert(truth[i]);
    classes.insert(pred[i]);
  }
  double sum = 0;
  for (int c : classes) {
    double tp = confusion[{c, c}], fp = 0, fn = 0;
    for (int o : classes) {
      if (o == c) continue;
      fp += confusion[{o, c}];
      fn += confusion[{c, o}];
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0;
    sum += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
  }
  return sum / static_cast<double>(classes.size());
}

}  // namespace oracle

#endif  // EMBPROBE_TESTS_ORACLES_HPP_
