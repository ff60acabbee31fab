// tests/unit/test_training.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hierconv/errors.hpp"
#include "hierconv/eval.hpp"
#include "hierconv/training.hpp"

using namespace hierconv;
using namespace hierconv::training;

namespace {

data::GeneratorSettings tiny_gen() {
  data::GeneratorSettings s;
  s.train_conversations = 5;
  s.dev_conversations = 2;
  s.test_conversations = 2;
  s.min_utterances = 3;
  s.max_utterances = 5;
  s.num_labels = 8;
  s.vocab_size = 24;
  s.base_dim = 4;
  s.num_topics = 2;
  s.num_acts = 4;
  s.mean_tokens = 4;
  s.mean_frames_per_token = 2;
  s.p_hist = 0.5;
  return s;
}

model::ModelConfig tiny_model(const data::GeneratorSettings& gen) {
  model::ModelConfig m;
  m.d_model = 16;
  m.feature_dim = 6 * gen.base_dim;
  m.speech_layers = 1;
  m.speech_hidden = 8;
  m.vocab = gen.vocab_size;
  m.text_layers = 1;
  m.text_heads = 2;
  m.text_max_tokens = 16;
  m.conversation_layers = 1;
  m.conversation_heads = 1;
  m.n_max = 5;
  m.num_labels = gen.num_labels;
  return m;
}

TrainingConfig tiny_train(model::Regime regime, int epochs) {
  TrainingConfig c;
  c.regime = regime;
  c.learning_rate = 2e-3;
  c.dropout = 0.0;
  c.batch_size = 12;
  c.max_epochs = epochs;
  c.patience = epochs;
  c.n_max = 5;
  c.dropframe.enabled = false;
  c.weights.lambda_euc = regime == model::Regime::kHierST ? 1.0 : 0.0;
  c.weights.lambda_con = regime == model::Regime::kHierST ? 1.0 : 0.0;
  c.seed = 777;
  c.log_train_f1 = false;
  return c;
}

}  // namespace

TEST_CASE("early stopper stops patience epochs after the peak and keeps it") {
  // Metric peaks at epoch 3, then declines.
  const double stream[] = {0.1, 0.4, 0.5, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3};
  EarlyStopper stopper(4);
  int stopped_at = -1;
  for (int e = 0; e < 10; ++e) {
    if (stopper.observe(e, stream[e])) {
      stopped_at = e;
      break;
    }
  }
  CHECK(stopped_at == 7);  // 3 + patience
  CHECK(stopper.best_epoch() == 3);
  CHECK(stopper.best_metric() == doctest::Approx(0.9));
}

TEST_CASE("early stopper runs out the stream when the metric keeps improving") {
  EarlyStopper stopper(3);
  for (int e = 0; e < 20; ++e) CHECK(!stopper.observe(e, 0.1 * e));
  CHECK(stopper.best_epoch() == 19);
}

TEST_CASE("adam minimizes a simple quadratic") {
  Tensor x("x", 1, 4);
  x.value << 5.0, -3.0, 2.0, 8.0;
  Adam opt({&x}, 0.1);
  for (int i = 0; i < 400; ++i) {
    x.grad = 2.0 * x.value;  // d/dx ||x||^2
    opt.step();
  }
  CHECK(x.value.cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("training is bit-deterministic under a fixed seed") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 99);
  auto mcfg = tiny_model(gen);
  auto tcfg = tiny_train(model::Regime::kHierST, 2);

  model::ModelParams a(mcfg, tcfg.seed), b(mcfg, tcfg.seed);
  train(a, corpus.train, corpus.dev, tcfg);
  train(b, corpus.train, corpus.dev, tcfg);
  CHECK(value_checksum(a.all_tensors()) == value_checksum(b.all_tensors()));

  TrainingConfig other = tcfg;
  other.seed = 778;
  model::ModelParams c(mcfg, tcfg.seed);
  train(c, corpus.train, corpus.dev, other);
  CHECK(value_checksum(a.all_tensors()) != value_checksum(c.all_tensors()));
}

TEST_CASE("HIER-S never reads or writes the text bucket, and vice versa") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 55);
  auto mcfg = tiny_model(gen);

  model::ModelParams p(mcfg, 1234);
  const auto text_before = value_checksum(p.text_tensors());
  const auto speech_before = value_checksum(p.speech_tensors());
  train(p, corpus.train, corpus.dev, tiny_train(model::Regime::kHierS, 2));
  CHECK(value_checksum(p.text_tensors()) == text_before);
  CHECK(value_checksum(p.speech_tensors()) != speech_before);

  model::ModelParams q(mcfg, 1234);
  train(q, corpus.train, corpus.dev, tiny_train(model::Regime::kHierT, 2));
  CHECK(value_checksum(q.speech_tensors()) == speech_before);
  CHECK(value_checksum(q.text_tensors()) != text_before);
}

TEST_CASE("frozen encoders are excluded from optimization") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 56);
  auto mcfg = tiny_model(gen);
  model::ModelParams p(mcfg, 4321);
  const auto speech_before = value_checksum(p.speech_tensors());
  auto cfg = tiny_train(model::Regime::kHierST, 2);
  cfg.freeze_speech = true;
  train(p, corpus.train, corpus.dev, cfg);
  CHECK(value_checksum(p.speech_tensors()) == speech_before);
  CHECK(value_checksum(p.text_tensors()) != value_checksum(model::ModelParams(mcfg, 4321).text_tensors()));
}

TEST_CASE("both branch losses shape the shared conversation encoder") {
  // One optimizer pass under HIER-ST (lambdas 0) vs dropping either BCE arm:
  // phi must differ in all three cases.
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 77);
  auto mcfg = tiny_model(gen);

  auto run = [&](model::Regime r) {
    auto cfg = tiny_train(r, 1);
    cfg.weights.lambda_euc = 0.0;
    cfg.weights.lambda_con = 0.0;
    model::ModelParams p(mcfg, 11);
    train(p, corpus.train, corpus.dev, cfg);
    return value_checksum(p.conversation_tensors());
  };
  const auto both = run(model::Regime::kHierST);
  const auto speech_only = run(model::Regime::kHierS);
  const auto text_only = run(model::Regime::kHierT);
  CHECK(both != speech_only);
  CHECK(both != text_only);
  CHECK(speech_only != text_only);
}

TEST_CASE("a text-branch step moves the speech branch through shared phi") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 78);
  auto mcfg = tiny_model(gen);
  model::ModelParams p(mcfg, 22);

  eval::EvalSettings es;
  es.regime = model::Regime::kHierS;
  es.n_max = 5;
  auto before = eval::evaluate(p, corpus.dev, es);

  // Speech bucket untouched by a HIER-T step...
  const auto speech_before = value_checksum(p.speech_tensors());
  train(p, corpus.train, corpus.dev, tiny_train(model::Regime::kHierT, 1));
  CHECK(value_checksum(p.speech_tensors()) == speech_before);

  // ...yet the speech branch's predictions change, because phi is shared.
  Graph g;
  model::BatchConversation item;
  item.conv = &corpus.dev.conversations[0];
  auto prepared = prepare_features(corpus.dev, 2);
  item.features = prepared.features[0];
  model::ForwardOptions opts;
  opts.regime = model::Regime::kHierS;
  opts.n_max = 5;
  model::ModelParams fresh(mcfg, 22);
  Graph g2;
  auto out_before = model::build_forward(g2, fresh, {item}, opts);
  auto out_after = model::build_forward(g, p, {item}, opts);
  const Mat diff =
      g.value(out_after.speech_context) - g2.value(out_before.speech_context);
  CHECK(diff.cwiseAbs().maxCoeff() > 1e-9);
}

TEST_CASE("excluding phi from the optimizer freezes speech-branch contexts") {
  // Counterpart of the shared-phi transfer check: one text-branch step whose
  // optimizer covers only the text bucket leaves speech context embeddings
  // bit-identical, because neither theta_s nor phi moved.
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 81);
  auto mcfg = tiny_model(gen);
  model::ModelParams p(mcfg, 44);
  auto prepared = prepare_features(corpus.dev, 2);

  auto speech_context = [&]() {
    Graph g;
    model::BatchConversation item;
    item.conv = &corpus.dev.conversations[0];
    item.features = prepared.features[0];
    model::ForwardOptions opts;
    opts.regime = model::Regime::kHierS;
    opts.n_max = 5;
    auto out = model::build_forward(g, p, {item}, opts);
    return g.value(out.speech_context);
  };

  const Mat before = speech_context();
  {
    auto prepared_train = prepare_features(corpus.train, 2);
    Graph g;
    model::BatchConversation item;
    item.conv = &corpus.train.conversations[0];
    item.features = prepared_train.features[0];
    model::ForwardOptions opts;
    opts.regime = model::Regime::kHierT;
    opts.training = true;
    opts.n_max = 5;
    auto out = model::build_forward(g, p, {item}, opts);
    zero_grads(p.all_tensors());
    g.backward(out.loss_total);
    Adam text_only(p.text_tensors(), 1e-2);
    text_only.step();
  }
  CHECK(speech_context() == before);

  // Whereas the full HIER-T step (phi included) does move them.
  train(p, corpus.train, corpus.dev, tiny_train(model::Regime::kHierT, 1));
  CHECK(speech_context() != before);
}

TEST_CASE("tying all context positions widens the cross-modal pair set") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 91);
  auto mcfg = tiny_model(gen);
  model::ModelParams p(mcfg, 55);
  auto prepared = prepare_features(corpus.train, 2);

  auto crossmodal = [&](bool tie_all) {
    Graph g;
    model::BatchConversation item;
    item.conv = &corpus.train.conversations[0];
    item.features = prepared.features[0];
    model::ForwardOptions opts;
    opts.regime = model::Regime::kHierST;
    opts.training = true;
    opts.n_max = 5;
    opts.tie_all_utterances = tie_all;
    opts.weights.lambda_euc = 1.0;
    opts.weights.lambda_con = 1.0;
    auto out = model::build_forward(g, p, {item}, opts);
    return std::pair<double, double>(g.value(out.loss_euclidean)(0, 0),
                                     g.value(out.loss_contrastive)(0, 0));
  };
  auto current_only = crossmodal(false);
  auto all_positions = crossmodal(true);
  // History positions enter the pair set, so the batch means change.
  CHECK(current_only.first != all_positions.first);
  CHECK(current_only.second != all_positions.second);
}

TEST_CASE("loss decreases over the first epochs in every regime") {
  auto gen = tiny_gen();
  for (auto regime : {model::Regime::kHierS, model::Regime::kHierT,
                      model::Regime::kHierST}) {
    double first_mean = 0.0, last_mean = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      auto corpus = data::generate_corpus(gen, 100 + seed);
      auto cfg = tiny_train(regime, 4);
      cfg.seed = seed;
      model::ModelParams p(tiny_model(gen), seed);
      auto res = train(p, corpus.train, corpus.dev, cfg);
      first_mean += res.history.front().total;
      last_mean += res.history.back().total;
    }
    INFO("regime ", model::regime_name(regime), " first ", first_mean, " last ",
         last_mean);
    CHECK(last_mean < first_mean);
  }
}

TEST_CASE("text regimes require transcripts") {
  auto gen = tiny_gen();
  gen.include_transcripts = false;
  auto corpus = data::generate_corpus(gen, 31);
  model::ModelParams p(tiny_model(gen), 3);
  CHECK_THROWS_AS(
      train(p, corpus.train, corpus.dev, tiny_train(model::Regime::kHierT, 1)),
      ConfigError);
  CHECK_THROWS_AS(
      train(p, corpus.train, corpus.dev, tiny_train(model::Regime::kHierST, 1)),
      ConfigError);
  CHECK_NOTHROW(
      train(p, corpus.train, corpus.dev, tiny_train(model::Regime::kHierS, 1)));
}

TEST_CASE("evaluating the best checkpoint on train reproduces the logged metric") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 41);
  auto cfg = tiny_train(model::Regime::kHierS, 3);
  cfg.log_train_f1 = true;
  model::ModelParams p(tiny_model(gen), 5);
  auto res = train(p, corpus.train, corpus.dev, cfg);
  REQUIRE(res.best_epoch >= 0);

  eval::EvalSettings es;
  es.regime = cfg.regime;
  es.n_max = cfg.n_max;
  es.threshold = cfg.eval_threshold;
  const double again = eval::evaluate(p, corpus.train, es).macro_f1;
  const double logged =
      res.history[static_cast<std::size_t>(res.best_epoch)].train_macro_f1;
  CHECK(std::abs(again - logged) < 1e-9);
}

TEST_CASE("a tiny corpus is memorized by HIER-S") {
  // With 6 utterances not every class can have support, and zero-support
  // classes score 0 by convention; memorization is judged on supported
  // classes only. The full-support overfit case lives in the acceptance
  // suite.
  auto gen = tiny_gen();
  gen.train_conversations = 2;
  gen.min_utterances = 3;
  gen.max_utterances = 3;
  auto corpus = data::generate_corpus(gen, 61);
  auto cfg = tiny_train(model::Regime::kHierS, 120);
  cfg.learning_rate = 3e-3;
  model::ModelParams p(tiny_model(gen), 6);
  train(p, corpus.train, corpus.train, cfg);

  eval::EvalSettings es;
  es.regime = cfg.regime;
  es.n_max = cfg.n_max;
  auto report = eval::evaluate(p, corpus.train, es);
  double supported_sum = 0.0;
  int supported = 0;
  for (const auto& s : report.per_class) {
    if (s.support > 0) {
      supported_sum += s.f1;
      ++supported;
    }
  }
  REQUIRE(supported > 0);
  INFO("mean F1 over ", supported, " supported classes ",
       supported_sum / supported);
  CHECK(supported_sum / supported >= 0.95);
}

TEST_CASE("dropframe with l above every length matches disabled exactly") {
  auto gen = tiny_gen();
  auto corpus = data::generate_corpus(gen, 71);
  auto mcfg = tiny_model(gen);
  auto cfg = tiny_train(model::Regime::kHierS, 2);

  auto rows = benchmark_dropframe(mcfg, cfg, corpus.train, corpus.dev,
                                  {100000, 0}, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].dev_macro_f1 == rows[1].dev_macro_f1);
}

TEST_CASE("invalid training configs are rejected") {
  TrainingConfig c;
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainingConfig{};
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainingConfig{};
  c.patience = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainingConfig{};
  c.weights.tau = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
