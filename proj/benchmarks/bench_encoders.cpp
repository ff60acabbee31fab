// benchmarks/bench_encoders.cpp

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

#include "hierconv/conversation.hpp"
#include "hierconv/encoders.hpp"

using namespace hierconv;

namespace {

Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

encoders::SpeechEncoderParams speech_params() {
  encoders::SpeechEncoderConfig cfg;
  cfg.input_dim = 48;
  cfg.layers = 2;
  cfg.hidden = 32;
  cfg.d_model = 64;
  return encoders::SpeechEncoderParams(cfg, Rng(1).child("init.speech"));
}

}  // namespace

// Forward pass over a padded batch of utterances.
static void BM_SpeechEncoderForward(benchmark::State& state) {
  auto params = speech_params();
  Rng rng(2);
  std::vector<Mat> utts;
  for (int b = 0; b < state.range(0); ++b)
    utts.push_back(random_mat(rng, 24, 48));
  std::vector<const Mat*> ptrs;
  for (const auto& u : utts) ptrs.push_back(&u);
  for (auto _ : state) {
    Graph g;
    auto out = encoders::encode_speech_batch(g, params, ptrs);
    benchmark::DoNotOptimize(g.value(out).data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpeechEncoderForward)->Arg(4)->Arg(16)->Arg(64);

// Forward plus backward, which is the training-time cost.
static void BM_SpeechEncoderTrainStep(benchmark::State& state) {
  auto params = speech_params();
  Rng rng(3);
  std::vector<Mat> utts;
  for (int b = 0; b < state.range(0); ++b)
    utts.push_back(random_mat(rng, 24, 48));
  std::vector<const Mat*> ptrs;
  for (const auto& u : utts) ptrs.push_back(&u);
  const Mat probe = random_mat(rng, static_cast<int>(state.range(0)), 64);
  for (auto _ : state) {
    zero_grads(params.tensors());
    Graph g;
    auto emb = encoders::encode_speech_batch(g, params, ptrs);
    auto loss = g.sum_all(g.emul(emb, g.constant(probe)));
    g.backward(loss);
    benchmark::DoNotOptimize(params.proj_w.grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpeechEncoderTrainStep)->Arg(4)->Arg(16)->Arg(64);

static void BM_TextEncoderForward(benchmark::State& state) {
  encoders::TextEncoderConfig cfg;
  cfg.vocab = 64;
  cfg.d_model = 64;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.max_tokens = 32;
  encoders::TextEncoderParams params(cfg, Rng(4).child("init.text"));
  Rng rng(5);
  std::vector<std::vector<int>> batch;
  for (int b = 0; b < state.range(0); ++b) {
    std::vector<int> tokens;
    for (int i = 0; i < 10; ++i) tokens.push_back(rng.uniform_int(64));
    batch.push_back(std::move(tokens));
  }
  std::vector<const std::vector<int>*> ptrs;
  for (const auto& t : batch) ptrs.push_back(&t);
  for (auto _ : state) {
    Graph g;
    auto out = encoders::encode_text_batch(g, params, ptrs);
    benchmark::DoNotOptimize(g.value(out).data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TextEncoderForward)->Arg(4)->Arg(16)->Arg(64);

static void BM_ConversationEncoder(benchmark::State& state) {
  conversation::ConversationEncoderConfig cfg;
  cfg.variant = state.range(1) == 0 ? conversation::Variant::kTransformer
                                    : conversation::Variant::kRecurrent;
  cfg.d_model = 64;
  cfg.layers = 2;
  cfg.heads = 1;
  cfg.n_max = 10;
  conversation::ConversationEncoderParams params(cfg, Rng(6).child("init.conv"));
  Rng rng(7);
  const Mat utts = random_mat(rng, static_cast<int>(state.range(0)), 64);
  for (auto _ : state) {
    Mat out = conversation::encode_context(utts, params);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ConversationEncoder)
    ->Args({1, 0})
    ->Args({10, 0})
    ->Args({1, 1})
    ->Args({10, 1});

BENCHMARK_MAIN();
