// benchmarks/bench_training.cpp

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

// Epoch cost as a function of the DropFrame length l, on long utterances.
// The relative ordering across l is what matters; absolute times are
// machine-dependent.

#include <benchmark/benchmark.h>

#include "hierconv/training.hpp"

using namespace hierconv;

namespace {

struct Fixture {
  data::GeneratedCorpus corpus;
  model::ModelConfig mcfg;

  Fixture() {
    data::GeneratorSettings g;
    g.train_conversations = 8;
    g.dev_conversations = 2;
    g.test_conversations = 2;
    g.min_utterances = 3;
    g.max_utterances = 4;
    g.num_labels = 8;
    g.vocab_size = 24;
    g.base_dim = 4;
    g.num_topics = 2;
    g.num_acts = 4;
    g.mean_tokens = 12;
    g.mean_frames_per_token = 12;
    g.p_hist = 0.5;
    corpus = data::generate_corpus(g, 9);

    mcfg.d_model = 32;
    mcfg.feature_dim = 6 * g.base_dim;
    mcfg.speech_layers = 2;
    mcfg.speech_hidden = 16;
    mcfg.vocab = g.vocab_size;
    mcfg.text_layers = 1;
    mcfg.text_heads = 2;
    mcfg.text_max_tokens = 32;
    mcfg.conversation_layers = 1;
    mcfg.conversation_heads = 1;
    mcfg.n_max = 4;
    mcfg.num_labels = g.num_labels;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_TrainEpochByDropFrame(benchmark::State& state) {
  auto& f = fixture();
  training::TrainingConfig t;
  t.regime = model::Regime::kHierS;
  t.max_epochs = 1;
  t.patience = 1;
  t.n_max = 4;
  t.batch_size = 12;
  t.log_train_f1 = false;
  t.dropframe.enabled = state.range(0) > 0;
  t.dropframe.max_len = state.range(0) > 0 ? static_cast<int>(state.range(0)) : 1;
  for (auto _ : state) {
    model::ModelParams params(f.mcfg, 1);
    auto result = training::train(params, f.corpus.train, f.corpus.dev, t);
    benchmark::DoNotOptimize(result.history.data());
  }
}
BENCHMARK(BM_TrainEpochByDropFrame)
    ->Arg(16)
    ->Arg(64)
    ->Arg(0)  // disabled
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
