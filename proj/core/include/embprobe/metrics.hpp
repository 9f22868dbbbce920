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

#ifndef EMBPROBE_METRICS_HPP_
#define EMBPROBE_METRICS_HPP_

#include <span>
#include <vector>

namespace embprobe {

/// Unweighted mean over the union of classes seen in either argument of the
/// per-class F1 = 2PR / (P + R), taken as 0 when P + R = 0.
/// Throws LengthMismatch (also for empty input).
double F1Macro(std::span<const int> y_true, std::span<const int> y_pred);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> values);

/// Spearman rank correlation: Pearson correlation of the average-rank vectors.
/// Throws LengthMismatch (or fewer than two items) and ZeroVariance.
double Srcc(std::span<const double> y_true, std::span<const double> y_pred);

double MeanSquaredError(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace embprobe

#endif  // EMBPROBE_METRICS_HPP_
