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

#include "embprobe/decision_tree.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "embprobe/error.hpp"
#include "embprobe/parallel.hpp"

namespace embprobe {
namespace {

struct Candidate {
  bool valid = false;
  double score = -std::numeric_limits<double>::infinity();
  double threshold = 0.0;
};

// Best gini split of `rows` on one feature. Weighted child impurity is
// n - (sq_l / n_l + sq_r / n_r), where sq is the sum of squared class counts,
// so the search maximises sq_l / n_l + sq_r / n_r.
Candidate BestSplitOnFeature(const Matrix &x, std::span<const int> labels,
                             const std::vector<std::size_t> &rows, std::size_t feature,
                             int num_classes, std::size_t min_leaf) {
  std::vector<std::pair<double, int>> items(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    items[i] = {x(rows[i], feature), labels[rows[i]]};
  std::sort(items.begin(), items.end());

  std::vector<long long> left(num_classes, 0), right(num_classes, 0);
  long long sq_left = 0, sq_right = 0;
  for (const auto &it : items) ++right[it.second];
  for (long long c : right) sq_right += c * c;

  Candidate best;
  const std::size_t n = items.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int c = items[i].second;
    sq_left += 2 * left[c] + 1;
    sq_right -= 2 * right[c] - 1;
    ++left[c];
    --right[c];
    const std::size_t n_left = i + 1;
    if (items[i].first == items[i + 1].first) continue;
    if (n_left < min_leaf || n - n_left < min_leaf) continue;
    const double score = static_cast<double>(sq_left) / static_cast<double>(n_left) +
                         static_cast<double>(sq_right) / static_cast<double>(n - n_left);
    if (score > best.score) {
      double t = items[i].first + (items[i + 1].first - items[i].first) / 2.0;
      if (!(t < items[i + 1].first)) t = items[i].first;
      best = {true, score, t};
    }
  }
  return best;
}

int Majority(std::span<const int> labels, const std::vector<std::size_t> &rows,
             int num_classes, bool *pure) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t r : rows) ++counts[labels[r]];
  int best = 0;
  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] > 0) ++present;
    if (counts[c] > counts[best]) best = c;
  }
  *pure = present <= 1;
  return best;
}

}  // namespace

DecisionTreeClassifier::DecisionTreeClassifier(TreeParams params) : params_(params) {
  if (params_.max_depth < 0 || params_.min_samples_leaf < 1)
    throw Error(ErrorCode::kInvalidArgument, "tree needs max_depth >= 0 and min_samples_leaf >= 1");
}

void DecisionTreeClassifier::Fit(const Matrix &x, std::span<const int> labels,
                                 std::span<const std::size_t> rows, int threads) {
  if (labels.size() != x.rows())
    throw Error(ErrorCode::kLengthMismatch, "one label per matrix row required");
  if (rows.empty()) throw Error(ErrorCode::kSingleClass, "no training rows");
  int num_classes = 0;
  for (std::size_t r : rows) {
    if (labels[r] < 0) throw Error(ErrorCode::kInvalidArgument, "class ids must be >= 0");
    num_classes = std::max(num_classes, labels[r] + 1);
  }
  {
    const int first = labels[rows.front()];
    if (std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return labels[r] == first; }))
      throw Error(ErrorCode::kSingleClass, "training labels are constant");
  }

  nodes_.clear();
  depth_ = 0;
  const std::size_t min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);

  struct Pending {
    int node;
    int depth;
    std::vector<std::size_t> rows;
  };
  std::vector<Pending> stack;
  nodes_.push_back({});
  stack.push_back({0, 0, std::vector<std::size_t>(rows.begin(), rows.end())});
  std::vector<Candidate> per_feature(x.cols());

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    depth_ = std::max(depth_, job.depth);
    bool pure = false;
    nodes_[job.node].label = Majority(labels, job.rows, num_classes, &pure);
    if (pure || (params_.max_depth > 0 && job.depth >= params_.max_depth) ||
        job.rows.size() < 2 * min_leaf)
      continue;

    ParallelFor(x.cols(), threads, [&](std::size_t f) {
      per_feature[f] = BestSplitOnFeature(x, labels, job.rows, f, num_classes, min_leaf);
    });
    int feature = -1;
    for (std::size_t f = 0; f < x.cols(); ++f)
      if (per_feature[f].valid && (feature < 0 || per_feature[f].score > per_feature[feature].score))
        feature = static_cast<int>(f);
    if (feature < 0) continue;

    const double threshold = per_feature[feature].threshold;
    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : job.rows)
      (x(r, feature) <= threshold ? left_rows : right_rows).push_back(r);

    const int left = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    Node &node = nodes_[job.node];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = left + 1;
    stack.push_back({left + 1, job.depth + 1, std::move(right_rows)});
    stack.push_back({left, job.depth + 1, std::move(left_rows)});
  }
}

int DecisionTreeClassifier::Predict(std::span<const double> features) const {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArgument, "tree is not fitted");
  int n = 0;
  while (nodes_[n].feature >= 0)
    n = features[nodes_[n].feature] <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
  return nodes_[n].label;
}

std::vector<int> DecisionTreeClassifier::Predict(const Matrix &x,
                                                 std::span<const std::size_t> rows) const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(Predict(x.row(r)));
  return out;
}

}  // namespace embprobe
