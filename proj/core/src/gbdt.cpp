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

#include "embprobe/gbdt.hpp"

#include <algorithm>
#include <limits>

#include "embprobe/error.hpp"
#include "embprobe/parallel.hpp"

namespace embprobe {

FeatureBinner::FeatureBinner(const Matrix &x, std::span<const std::size_t> rows, int max_bins) {
  if (max_bins < 2 || max_bins > 256)
    throw Error(ErrorCode::kInvalidArgument, "histogram_bins must be in [2, 256]");
  boundaries_.resize(x.cols());
  std::vector<double> values(rows.size());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i) values[i] = x(rows[i], f);
    std::sort(values.begin(), values.end());
    auto &bounds = boundaries_[f];
    std::vector<double> distinct(values);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto midpoint = [](double lo, double hi) {
      const double m = lo + (hi - lo) / 2.0;
      return m > lo ? m : hi;
    };
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t i = 1; i < distinct.size(); ++i)
        bounds.push_back(midpoint(distinct[i - 1], distinct[i]));
      continue;
    }
    const std::size_t n = values.size();
    for (int k = 1; k < max_bins; ++k) {
      const double q = values[static_cast<std::size_t>(k) * n / static_cast<std::size_t>(max_bins)];
      const auto first = std::lower_bound(values.begin(), values.end(), q);
      if (first == values.begin()) continue;
      const double b = midpoint(*(first - 1), q);
      if (bounds.empty() || b > bounds.back()) bounds.push_back(b);
    }
  }
}

std::uint8_t FeatureBinner::Bin(std::size_t feature, double value) const {
  const auto &b = boundaries_[feature];
  return static_cast<std::uint8_t>(std::upper_bound(b.begin(), b.end(), value) - b.begin());
}

namespace {

struct HistBin {
  double grad = 0.0;
  std::size_t count = 0;
};

struct SplitInfo {
  double gain = 0.0;  // > 0 when valid
  int feature = -1;
  int bin = -1;  // bins <= bin go left
};

struct Leaf {
  std::vector<std::size_t> rows;
  double grad_sum = 0.0;
  std::vector<std::vector<HistBin>> hist;  // [feature][bin]
  SplitInfo split;
  int node = 0;
};

}  // namespace

GbdtRegressor::GbdtRegressor(GbdtParams params) : params_(params) {
  if (params_.n_rounds < 1 || !(params_.learning_rate > 0.0) || params_.max_leaves < 2 ||
      params_.min_data_in_leaf < 1)
    throw Error(ErrorCode::kInvalidArgument, "GBDT parameters must be positive");
}

void GbdtRegressor::Fit(const Matrix &x, std::span<const double> targets,
                        std::span<const std::size_t> rows, int threads) {
  if (targets.size() != x.rows())
    throw Error(ErrorCode::kLengthMismatch, "one target per matrix row required");
  if (rows.empty() || std::all_of(rows.begin(), rows.end(), [&](std::size_t r) {
        return targets[r] == targets[rows.front()];
      }))
    throw Error(ErrorCode::kConstantTarget, "training targets have fewer than two distinct values");

  const std::size_t n_features = x.cols();
  const FeatureBinner binner(x, rows, params_.histogram_bins);
  // Column-major binned copy of the training rows; local row ids 0..n-1.
  const std::size_t n = rows.size();
  std::vector<std::vector<std::uint8_t>> bins(n_features, std::vector<std::uint8_t>(n));
  ParallelFor(n_features, threads, [&](std::size_t f) {
    for (std::size_t i = 0; i < n; ++i) bins[f][i] = binner.Bin(f, x(rows[i], f));
  });

  double sum = 0.0;
  for (std::size_t r : rows) sum += targets[r];
  base_ = sum / static_cast<double>(n);
  std::vector<double> pred(n, base_);
  std::vector<double> grad(n);
  trees_.clear();
  training_loss_.clear();

  auto loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pred[i] - targets[rows[i]];
      s += d * d;
    }
    return s / static_cast<double>(n);
  };
  training_loss_.push_back(loss());

  const std::size_t min_leaf = static_cast<std::size_t>(params_.min_data_in_leaf);

  auto build_hist = [&](Leaf &leaf) {
    leaf.hist.assign(n_features, {});
    ParallelFor(n_features, threads, [&](std::size_t f) {
      auto &h = leaf.hist[f];
      h.assign(binner.bin_count(f), {});
      for (std::size_t i : leaf.rows) {
        auto &b = h[bins[f][i]];
        b.grad += grad[i];
        ++b.count;
      }
    });
  };

  std::vector<SplitInfo> per_feature(n_features);
  auto find_split = [&](Leaf &leaf) {
    leaf.split = {};
    const double total_g = leaf.grad_sum;
    const std::size_t total_n = leaf.rows.size();
    if (total_n < 2 * min_leaf) return;
    const double parent = total_g * total_g / static_cast<double>(total_n);
    ParallelFor(n_features, threads, [&](std::size_t f) {
      SplitInfo best;
      double g_left = 0.0;
      std::size_t n_left = 0;
      const auto &h = leaf.hist[f];
      for (std::size_t b = 0; b + 1 < h.size(); ++b) {
        g_left += h[b].grad;
        n_left += h[b].count;
        if (n_left < min_leaf) continue;
        if (total_n - n_left < min_leaf) break;
        if (h[b].count == 0) continue;  // same partition as an earlier bin
        const double g_right = total_g - g_left;
        const double gain = g_left * g_left / static_cast<double>(n_left) +
                            g_right * g_right / static_cast<double>(total_n - n_left) - parent;
        if (gain > best.gain) best = {gain, static_cast<int>(f), static_cast<int>(b)};
      }
      per_feature[f] = best;
    });
    for (const auto &s : per_feature)
      if (s.feature >= 0 && s.gain > leaf.split.gain) leaf.split = s;
  };

  for (int round = 0; round < params_.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - targets[rows[i]];

    Tree tree(1);
    std::vector<Leaf> leaves(1);
    leaves[0].rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) leaves[0].rows[i] = i;
    for (std::size_t i = 0; i < n; ++i) leaves[0].grad_sum += grad[i];
    build_hist(leaves[0]);
    find_split(leaves[0]);

    while (static_cast<int>(leaves.size()) < params_.max_leaves) {
      int pick = -1;
      for (std::size_t l = 0; l < leaves.size(); ++l)
        if (leaves[l].split.feature >= 0 &&
            (pick < 0 || leaves[l].split.gain > leaves[pick].split.gain))
          pick = static_cast<int>(l);
      if (pick < 0) break;

      Leaf parent = std::move(leaves[pick]);
      const int f = parent.split.feature;
      const int b = parent.split.bin;
      Leaf left, right;
      for (std::size_t i : parent.rows) {
        if (bins[f][i] <= b) {
          left.rows.push_back(i);
          left.grad_sum += grad[i];
        } else {
          right.rows.push_back(i);
          right.grad_sum += grad[i];
        }
      }
      // Histogram the smaller child; the sibling is parent minus it.
      Leaf &small = left.rows.size() <= right.rows.size() ? left : right;
      Leaf &large = left.rows.size() <= right.rows.size() ? right : left;
      build_hist(small);
      large.hist = std::move(parent.hist);
      for (std::size_t ff = 0; ff < n_features; ++ff)
        for (std::size_t bb = 0; bb < large.hist[ff].size(); ++bb) {
          large.hist[ff][bb].grad -= small.hist[ff][bb].grad;
          large.hist[ff][bb].count -= small.hist[ff][bb].count;
        }

      const int left_node = static_cast<int>(tree.size());
      tree.push_back({});
      tree.push_back({});
      Node &node = tree[parent.node];
      node.feature = f;
      node.threshold = binner.boundaries(f)[b];
      node.left = left_node;
      node.right = left_node + 1;
      left.node = left_node;
      right.node = left_node + 1;
      find_split(left);
      find_split(right);
      leaves[pick] = std::move(left);
      leaves.insert(leaves.begin() + pick + 1, std::move(right));
    }

    for (auto &leaf : leaves) {
      // Newton step for squared error: minus the mean gradient.
      const double value =
          -params_.learning_rate * leaf.grad_sum / static_cast<double>(leaf.rows.size());
      tree[leaf.node].value = value;
      for (std::size_t i : leaf.rows) pred[i] += value;
    }
    trees_.push_back(std::move(tree));
    training_loss_.push_back(loss());
  }
}

double GbdtRegressor::Predict(std::span<const double> features) const {
  double out = base_;
  for (const auto &tree : trees_) {
    int n = 0;
    while (tree[n].feature >= 0)
      n = features[tree[n].feature] < tree[n].threshold ? tree[n].left : tree[n].right;
    out += tree[n].value;
  }
  return out;
}

std::vector<double> GbdtRegressor::Predict(const Matrix &x,
                                           std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(Predict(x.row(r)));
  return out;
}

}  // namespace embprobe
