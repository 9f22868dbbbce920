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

#ifndef EMBPROBE_DECISION_TREE_HPP_
#define EMBPROBE_DECISION_TREE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "embprobe/matrix.hpp"

namespace embprobe {

struct TreeParams {
  int max_depth = 0;  // 0 = grow until pure
  int min_samples_leaf = 1;
};

// CART classifier on gini impurity with axis-aligned thresholds.
//
// Every impure node is split while some feature separates it into two
// children of at least min_samples_leaf rows, even if the impurity decrease is
// zero, so unlimited depth fits any consistent training set exactly. Ties in
// the split criterion go to the lowest feature index, then the lowest
// threshold; ties in the leaf vote go to the lowest class id.
class DecisionTreeClassifier {
 public:
  explicit DecisionTreeClassifier(TreeParams params = {});

  // labels[r] is the class id (>= 0) of row r of x; only `rows` are used.
  // Throws SingleClass when the training rows carry one label only.
  void Fit(const Matrix &x, std::span<const int> labels, std::span<const std::size_t> rows,
           int threads = 1);

  int Predict(std::span<const double> features) const;
  std::vector<int> Predict(const Matrix &x, std::span<const std::size_t> rows) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  int depth() const noexcept { return depth_; }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // x <= threshold goes left
    int left = -1;
    int right = -1;
    int label = 0;
  };

  TreeParams params_;
  std::vector<Node> nodes_;
  int depth_ = 0;
};

}  // namespace embprobe

#endif  // EMBPROBE_DECISION_TREE_HPP_
