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

#include <vector>

#include "embprobe/corpus.hpp"
#include "embprobe/rng.hpp"
#include "embprobe/simmetrics.hpp"
#include "embprobe/synthbench.hpp"

namespace {

using namespace embprobe;

void BM_ComputeEer(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> same(n / 5), diff(n - n / 5);
  for (double &v : same) v = rng.Normal(0.6, 0.2);
  for (double &v : diff) v = rng.Normal(0.1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeEer(same, diff));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeEer)->Range(1 << 10, 1 << 18);

EvaluationDataset Corpus(int speakers, int utts, int dim) {
  SynthSpec spec;
  spec.n_speakers = speakers;
  spec.utts_per_speaker = utts;
  spec.dim = dim;
  const auto c = Generate(spec);
  return BuildDataset(c.records, c.embeddings);
}

void BM_SampleTrials(benchmark::State &state) {
  const auto ds = Corpus(46, 60, 16);
  for (auto _ : state) benchmark::DoNotOptimize(SampleTrials(ds, 1000, 200, 7));
  state.SetItemsProcessed(state.iterations() * 46000);
}
BENCHMARK(BM_SampleTrials)->Unit(benchmark::kMillisecond);

void BM_ScoreTrials(benchmark::State &state) {
  const auto ds = Corpus(46, 60, 192);
  const auto trials = SampleTrials(ds, 1000, 200, 7);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ScoreTrials(ds, trials.trials, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials.trials.size()));
}
BENCHMARK(BM_ScoreTrials)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_IntraSpeakerMeans(benchmark::State &state) {
  const auto ds = Corpus(20, static_cast<int>(state.range(0)), 192);
  for (auto _ : state) benchmark::DoNotOptimize(IntraSpeakerMeans(ds));
}
BENCHMARK(BM_IntraSpeakerMeans)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
