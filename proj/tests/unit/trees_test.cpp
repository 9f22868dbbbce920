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

#include <gtest/gtest.h>

#include <numeric>

#include "embprobe/decision_tree.hpp"
#include "embprobe/error.hpp"
#include "embprobe/gbdt.hpp"
#include "embprobe/rng.hpp"

namespace embprobe {
namespace {

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

Matrix RandomMatrix(std::size_t n, std::size_t d, Rng &rng) {
  Matrix x(n, d);
  for (double &v : x.data()) v = rng.Normal();
  return x;
}

TEST(DecisionTree, SingleClassRejected) {
  Matrix x(3, 1);
  const std::vector<int> y = {4, 4, 4};
  DecisionTreeClassifier tree;
  try {
    tree.Fit(x, y, AllRows(3));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
  }
}

TEST(DecisionTree, ThresholdOnOneFeature) {
  Matrix x(4, 2);
  const double vals[4][2] = {{0, 5}, {1, 5}, {2, 5}, {3, 5}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) x(i, j) = vals[i][j];
  const std::vector<int> y = {0, 0, 1, 1};
  DecisionTreeClassifier tree;
  tree.Fit(x, y, AllRows(4));
  EXPECT_EQ(tree.node_count(), 3u);
  EXPECT_EQ(tree.depth(), 1);
  EXPECT_EQ(tree.Predict(std::vector<double>{1.49, 0}), 0);
  EXPECT_EQ(tree.Predict(std::vector<double>{1.51, 0}), 1);
}

TEST(DecisionTreeProperty, FitsConsistentDataExactly) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = RandomMatrix(200, 5, rng);
    std::vector<int> y(200);
    for (auto &v : y) v = static_cast<int>(rng.Below(4));
    DecisionTreeClassifier tree;
    const auto rows = AllRows(200);
    tree.Fit(x, y, rows, 2);
    EXPECT_EQ(tree.Predict(x, rows), y);
  }
}

TEST(DecisionTree, DepthLimit) {
  Rng rng(5);
  const Matrix x = RandomMatrix(100, 3, rng);
  std::vector<int> y(100);
  for (auto &v : y) v = static_cast<int>(rng.Below(3));
  DecisionTreeClassifier tree({2, 1});
  tree.Fit(x, y, AllRows(100));
  EXPECT_LE(tree.depth(), 2);
  EXPECT_LE(tree.node_count(), 7u);
}

TEST(DecisionTree, ThreadCountDoesNotChangeModel) {
  Rng rng(6);
  const Matrix x = RandomMatrix(300, 8, rng);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = x(i, 2) + 0.3 * x(i, 5) > 0 ? 1 : 0;
  const auto rows = AllRows(300);
  DecisionTreeClassifier one, many;
  one.Fit(x, y, rows, 1);
  many.Fit(x, y, rows, 8);
  const Matrix probe = RandomMatrix(500, 8, rng);
  EXPECT_EQ(one.Predict(probe, AllRows(500)), many.Predict(probe, AllRows(500)));
  EXPECT_EQ(one.node_count(), many.node_count());
}

TEST(Binner, EqualFrequencyOnTrainingRows) {
  Matrix x(8, 1);
  for (std::size_t i = 0; i < 8; ++i) x(i, 0) = static_cast<double>(i);
  x(7, 0) = 1000;  // excluded from training rows
  const std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5, 6};
  FeatureBinner binner(x, rows, 4);
  EXPECT_LE(binner.bin_count(0), 4u);
  for (double b : binner.boundaries(0)) EXPECT_LT(b, 7.0);
  EXPECT_EQ(binner.Bin(0, -5), 0);
  EXPECT_EQ(binner.Bin(0, 1e9), binner.bin_count(0) - 1);
  for (std::size_t i = 1; i < 7; ++i) EXPECT_LE(binner.Bin(0, x(i - 1, 0)), binner.Bin(0, x(i, 0)));
}

TEST(Gbdt, ConstantTargetRejected) {
  Matrix x(30, 2, 1.0);
  const std::vector<double> y(30, 2.0);
  GbdtRegressor model;
  try {
    model.Fit(x, y, AllRows(30));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstantTarget);
  }
}

TEST(GbdtProperty, TrainingLossNonIncreasing) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = RandomMatrix(400, 6, rng);
    std::vector<double> y(400);
    for (std::size_t i = 0; i < 400; ++i)
      y[i] = std::sin(x(i, 0)) + x(i, 1) * x(i, 2) + 0.2 * rng.Normal();
    GbdtRegressor model;
    model.Fit(x, y, AllRows(400));
    const auto &loss = model.training_loss();
    ASSERT_EQ(loss.size(), 101u);  // initial constant + one per round
    for (std::size_t k = 1; k < loss.size(); ++k) EXPECT_LE(loss[k], loss[k - 1]);
    EXPECT_LT(loss.back(), loss.front());
  }
}

TEST(Gbdt, ThreadCountDoesNotChangePredictions) {
  Rng rng(9);
  const Matrix x = RandomMatrix(300, 5, rng);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = x(i, 0) - x(i, 3);
  GbdtRegressor a, b;
  a.Fit(x, y, AllRows(300), 1);
  b.Fit(x, y, AllRows(300), 8);
  EXPECT_EQ(a.Predict(x, AllRows(300)), b.Predict(x, AllRows(300)));
}

TEST(Gbdt, MinDataInLeafLimitsTrees) {
  Rng rng(10);
  const Matrix x = RandomMatrix(30, 2, rng);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = x(i, 0);
  GbdtParams params;
  params.min_data_in_leaf = 20;  // no split can leave 20 rows on both sides
  GbdtRegressor model(params);
  model.Fit(x, y, AllRows(30));
  const auto p = model.Predict(x, AllRows(30));
  for (double v : p) EXPECT_DOUBLE_EQ(v, p.front());
}

}  // namespace
}  // namespace embprobe
