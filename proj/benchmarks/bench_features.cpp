// benchmarks/bench_features.cpp

// Copyright 2026  The hierconv Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "hierconv/features.hpp"
#include "hierconv/rng.hpp"

using namespace hierconv;

namespace {

features::FeatureSequence make_seq(int t, int d) {
  Rng rng(1);
  features::FeatureSequence s;
  s.frames.resize(t, d);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < d; ++j) s.frames(i, j) = rng.normal();
  return s;
}

}  // namespace

static void BM_ComputeDeltas(benchmark::State& state) {
  const auto seq = make_seq(static_cast<int>(state.range(0)), 40);
  for (auto _ : state) {
    auto out = features::compute_deltas(seq);
    benchmark::DoNotOptimize(out.frames.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeDeltas)->Arg(64)->Arg(256)->Arg(1024);

static void BM_FullPipeline(benchmark::State& state) {
  const auto seq = make_seq(static_cast<int>(state.range(0)), 40);
  for (auto _ : state) {
    auto out = features::pipeline(seq);
    benchmark::DoNotOptimize(out.frames.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullPipeline)->Arg(64)->Arg(256)->Arg(1024);

static void BM_DropFrames(benchmark::State& state) {
  const auto seq = make_seq(1024, 240);
  features::DropFrameConfig cfg{static_cast<int>(state.range(0)), true};
  Rng rng(2);
  for (auto _ : state) {
    auto out = features::drop_frames(seq, cfg, rng);
    benchmark::DoNotOptimize(out.frames.data());
  }
}
BENCHMARK(BM_DropFrames)->Arg(64)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
