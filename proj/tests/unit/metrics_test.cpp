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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "embprobe/error.hpp"
#include "embprobe/rng.hpp"
#include "oracles.hpp"

namespace embprobe {
namespace {

TEST(F1Macro, Examples) {
  const std::vector<int> y = {0, 1, 2, 1, 0};
  EXPECT_DOUBLE_EQ(F1Macro(y, y), 1.0);
  const std::vector<int> t = {0, 1, 1, 0}, flipped = {1, 0, 0, 1};
  EXPECT_DOUBLE_EQ(F1Macro(t, flipped), 0.0);
}

TEST(F1Macro, HandComputedFixture) {
  // a: P=1, R=1/2 -> 2/3; b: P=1/3, R=1 -> 1/2; c: 0.
  const std::vector<int> truth = {0, 0, 1, 2}, pred = {0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(F1Macro(truth, pred), 7.0 / 18.0);
  EXPECT_DOUBLE_EQ(F1Macro(truth, pred), 0.38888888888888884);
  EXPECT_DOUBLE_EQ(oracle::MacroF1(truth, pred), 7.0 / 18.0);
}

TEST(F1Macro, Errors) {
  const std::vector<int> a = {1, 2}, b = {1};
  EXPECT_THROW(F1Macro(a, b), Error);
  EXPECT_THROW(F1Macro(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST(F1MacroProperty, MatchesConfusionOracleAndRelabelling) {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const auto n = 1 + rng.Below(40);
    const auto k = 1 + rng.Below(6);
    std::vector<int> truth(n), pred(n);
    for (auto &v : truth) v = static_cast<int>(rng.Below(k));
    for (auto &v : pred) v = static_cast<int>(rng.Below(k));
    EXPECT_NEAR(F1Macro(truth, pred), oracle::MacroF1(truth, pred), 1e-15);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 10);
    Shuffle(perm, rng);
    std::vector<int> rt, rp;
    for (int v : truth) rt.push_back(perm[static_cast<std::size_t>(v)]);
    for (int v : pred) rp.push_back(perm[static_cast<std::size_t>(v)]);
    EXPECT_NEAR(F1Macro(rt, rp), F1Macro(truth, pred), 1e-15);
  }
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v = {10, 20, 20, 5};
  EXPECT_EQ(AverageRanks(v), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Srcc, Examples) {
  const std::vector<double> x = {1, 5, 3, 9, 2}, rev = {9, 1, 5, -3, 7};
  EXPECT_DOUBLE_EQ(Srcc(x, x), 1.0);
  EXPECT_DOUBLE_EQ(Srcc(x, rev), -1.0);
}

TEST(Srcc, TiedFixture) {
  const std::vector<double> t = {1, 2, 2, 4}, p = {1, 3, 2, 4};
  EXPECT_NEAR(Srcc(t, p), 0.9486832980505139, 1e-15);
  EXPECT_NEAR(oracle::Spearman({1, 2, 2, 4}, {1, 3, 2, 4}), 0.9486832980505139, 1e-15);
}

TEST(Srcc, Errors) {
  auto code = [](std::vector<double> a, std::vector<double> b) {
    try {
      Srcc(a, b);
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code({1, 2}, {1}), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code({1}, {1}), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code({1, 1, 1}, {1, 2, 3}), ErrorCode::kZeroVariance);
}

TEST(SrccProperty, OracleAndMonotoneInvariance) {
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    const auto n = 3 + rng.Below(30);
    std::vector<double> a(n), b(n);
    for (auto &v : a) v = std::round(rng.Normal() * 3);
    for (auto &v : b) v = std::round(rng.Normal() * 3);
    a[0] = 100;  // keeps variance positive
    b[1] = -100;
    const double s = Srcc(a, b);
    EXPECT_NEAR(s, oracle::Spearman(a, b), 1e-12);
    std::vector<double> ta;
    for (double v : a) ta.push_back(std::cbrt(v) * 2 - 7);
    EXPECT_NEAR(Srcc(ta, b), s, 1e-12);
    EXPECT_LE(std::abs(s), 1.0 + 1e-15);
  }
}

TEST(Mse, Basic) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 4, 0};
  EXPECT_DOUBLE_EQ(MeanSquaredError(a, b), 13.0 / 3.0);
}

}  // namespace
}  // namespace embprobe
