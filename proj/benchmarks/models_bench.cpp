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

#include <benchmark/benchmark.h>

#include <numeric>
#include <string>
#include <vector>

#include "embprobe/decision_tree.hpp"
#include "embprobe/gbdt.hpp"
#include "embprobe/projection.hpp"
#include "embprobe/rng.hpp"

namespace {

using namespace embprobe;

Matrix RandomMatrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, d);
  for (double &v : x.data()) v = rng.Normal();
  return x;
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

void BM_TreeFit(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = RandomMatrix(n, 64, 1);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 20);
  const auto rows = AllRows(n);
  for (auto _ : state) {
    DecisionTreeClassifier tree;
    tree.Fit(x, y, rows, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(tree.node_count());
  }
}
BENCHMARK(BM_TreeFit)->Args({500, 1})->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);

void BM_GbdtFit(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = RandomMatrix(n, 64, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x(i, 0) * 2 + x(i, 1) * x(i, 2);
  const auto rows = AllRows(n);
  for (auto _ : state) {
    GbdtRegressor model;
    model.Fit(x, y, rows, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(model.tree_count());
  }
}
BENCHMARK(BM_GbdtFit)->Args({1000, 1})->Args({4000, 1})->Args({4000, 4})->Unit(benchmark::kMillisecond);

void BM_CalibrateAffinities(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = RandomMatrix(n, 64, 3);
  for (auto _ : state) benchmark::DoNotOptimize(CalibrateAffinities(x, 30.0));
}
BENCHMARK(BM_CalibrateAffinities)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TsneEmbed(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = RandomMatrix(n, 32, 4);
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back("u" + std::to_string(i));
  TsneConfig config;
  config.iterations = 100;
  config.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(TsneEmbed(x, keys, config));
  state.SetItemsProcessed(state.iterations() * config.iterations);
}
BENCHMARK(BM_TsneEmbed)->Args({500, 1})->Args({500, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
