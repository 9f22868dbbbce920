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

#ifndef EMBPROBE_GBDT_HPP_
#define EMBPROBE_GBDT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "embprobe/matrix.hpp"

namespace embprobe {

struct GbdtParams {
  int n_rounds = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_data_in_leaf = 20;
  int histogram_bins = 255;
};

// Equal-frequency bin boundaries per feature, computed from training rows.
// bin(x) = number of boundaries <= x, so features with few distinct values get
// one bin per value.
class FeatureBinner {
 public:
  FeatureBinner() = default;
  FeatureBinner(const Matrix &x, std::span<const std::size_t> rows, int max_bins);

  std::size_t bin_count(std::size_t feature) const { return boundaries_[feature].size() + 1; }
  std::uint8_t Bin(std::size_t feature, double value) const;
  const std::vector<double> &boundaries(std::size_t feature) const {
    return boundaries_[feature];
  }

 private:
  std::vector<std::vector<double>> boundaries_;
};

// Gradient boosting of regression trees on squared error. Each round grows a
// histogram-based tree leaf-wise (the leaf with the largest gain splits first)
// on the current residuals and adds it scaled by the learning rate. The
// initial prediction is the training mean.
class GbdtRegressor {
 public:
  explicit GbdtRegressor(GbdtParams params = {});

  // targets[r] belongs to row r of x; only `rows` are used. Throws
  // ConstantTarget when fewer than two distinct targets are present.
  void Fit(const Matrix &x, std::span<const double> targets, std::span<const std::size_t> rows,
           int threads = 1);

  double Predict(std::span<const double> features) const;
  std::vector<double> Predict(const Matrix &x, std::span<const std::size_t> rows) const;

  // Mean squared training error after the initial constant and after each round.
  const std::vector<double> &training_loss() const noexcept { return training_loss_; }
  std::size_t tree_count() const noexcept { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // x < threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  GbdtParams params_;
  double base_ = 0.0;
  std::vector<Tree> trees_;
  std::vector<double> training_loss_;
};

}  // namespace embprobe

#endif  // EMBPROBE_GBDT_HPP_
