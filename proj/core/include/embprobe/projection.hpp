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

#ifndef EMBPROBE_PROJECTION_HPP_
#define EMBPROBE_PROJECTION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "embprobe/matrix.hpp"

namespace embprobe {

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iteration = 250;
  int kl_interval = 50;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Largest perplexity accepted for n points: (n - 1) / 3.
double MaxPerplexity(std::size_t n);

// Throws InvalidArgument unless n >= 4, 1 <= perplexity <= (n - 1) / 3 and
// the iteration counts are positive.
void ValidateConfig(const TsneConfig &config, std::size_t n);

struct Affinities {
  Matrix joint;                          // symmetric, zero diagonal, sums to 1
  std::vector<double> row_entropy_bits;  // entropy of each conditional row
  std::vector<double> precision;         // Gaussian 1 / (2 sigma^2) per row
};

// Per-row Gaussian bandwidths found by bisection so that each conditional
// distribution has 2^H = perplexity, then P = (P_j|i + P_i|j) / 2N.
// Rows whose neighbours are all equidistant stay uniform whatever the
// bandwidth. Throws DegenerateDistances when every pairwise distance is zero.
Affinities CalibrateAffinities(const Matrix &x, double perplexity, int threads = 1);

struct KlCheckpoint {
  int iteration = 0;  // 1-based count of completed iterations
  double kl = 0.0;
};

struct Projection {
  std::vector<std::string> keys;
  Matrix coords;  // keys.size() x 2
  std::vector<KlCheckpoint> kl_trace;
};

// Exact t-SNE (Student-t low-dimensional kernel, momentum + gains, early
// exaggeration). Points are processed in key order internally and each
// starting position is drawn from a generator keyed by (seed, key), so the
// result does not depend on row order or thread count. KL(P || Q) is recorded
// every kl_interval iterations and after the last one.
Projection TsneEmbed(const Matrix &x, std::span<const std::string> keys,
                     const TsneConfig &config);

// KL(P || Q) of a 2-D layout.
double KlDivergence(const Matrix &joint, const Matrix &coords);

void WriteProjection(const Projection &projection, const TsneConfig &config,
                     const std::filesystem::path &csv_path,
                     const std::filesystem::path &json_path);

}  // namespace embprobe

#endif  // EMBPROBE_PROJECTION_HPP_
