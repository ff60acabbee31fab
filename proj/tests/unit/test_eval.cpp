// tests/unit/test_eval.cpp

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

#include <vector>

#include "hierconv/errors.hpp"
#include "hierconv/eval.hpp"
#include "hierconv/rng.hpp"

using namespace hierconv;
using namespace hierconv::eval;

namespace {

Mat random_binary(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform_int(2);
  return m;
}

}  // namespace

TEST_CASE("exact predictions with full support give macro-F1 of 1") {
  Rng rng(1);
  Mat t = random_binary(rng, 30, 4);
  // Force support in every class.
  for (int c = 0; c < 4; ++c) t(c, c) = 1.0;
  auto report = macro_f1(t, t);
  CHECK(report.macro_f1 == doctest::Approx(1.0));
  CHECK(report.zero_support_classes.empty());
}

TEST_CASE("complemented predictions give macro-F1 of 0") {
  Rng rng(2);
  Mat t = random_binary(rng, 20, 5);
  Mat p = Mat::Ones(20, 5) - t;
  CHECK(macro_f1(p, t).macro_f1 == doctest::Approx(0.0));
}

TEST_CASE("hand-counted confusion: both classes score 2/3") {
  // class 0: TP=1, FP=1, FN=0 -> F1 = 2/3.
  // class 1: TP=1, FP=0, FN=1 -> F1 = 2/3.
  Mat t(2, 2), p(2, 2);
  t << 1, 1,
       0, 1;
  p << 1, 1,
       1, 0;
  auto report = macro_f1(p, t);
  CHECK(report.per_class[0].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(report.per_class[1].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(report.macro_f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("macro-F1 is invariant to batch order and class relabeling") {
  Rng rng(3);
  Mat t = random_binary(rng, 16, 6);
  Mat p = random_binary(rng, 16, 6);
  const double base = macro_f1(p, t).macro_f1;

  std::vector<int> rows(16);
  for (int i = 0; i < 16; ++i) rows[static_cast<std::size_t>(i)] = i;
  rng.shuffle(rows);
  Mat t2(16, 6), p2(16, 6);
  for (int i = 0; i < 16; ++i) {
    t2.row(i) = t.row(rows[static_cast<std::size_t>(i)]);
    p2.row(i) = p.row(rows[static_cast<std::size_t>(i)]);
  }
  CHECK(macro_f1(p2, t2).macro_f1 == doctest::Approx(base).epsilon(1e-14));

  std::vector<int> cols{5, 3, 0, 1, 4, 2};
  Mat t3(16, 6), p3(16, 6);
  for (int c = 0; c < 6; ++c) {
    t3.col(c) = t.col(cols[static_cast<std::size_t>(c)]);
    p3.col(c) = p.col(cols[static_cast<std::size_t>(c)]);
  }
  CHECK(macro_f1(p3, t3).macro_f1 == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("zero-support classes score 0 and are flagged") {
  Mat t = Mat::Zero(10, 3);
  Mat p = Mat::Zero(10, 3);
  t.col(0).setOnes();
  p.col(0).setOnes();
  p(3, 2) = 1.0;  // spurious prediction in an unsupported class
  auto report = macro_f1(p, t);
  CHECK(report.per_class[0].f1 == doctest::Approx(1.0));
  CHECK(report.per_class[1].f1 == 0.0);
  CHECK(report.per_class[2].f1 == 0.0);
  CHECK(report.zero_support_classes == std::vector<int>{1, 2});
  CHECK(report.macro_f1 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("shape mismatch is a data error") {
  CHECK_THROWS_AS(macro_f1(Mat::Zero(2, 3), Mat::Zero(2, 4)), DataError);
}

TEST_CASE("report serializes to a table and json") {
  Rng rng(4);
  Mat t = random_binary(rng, 8, 3);
  auto report = macro_f1(t, t);
  CHECK(report.to_table().find("macro-F1") != std::string::npos);
  CHECK(report.to_json().find("\"macro_f1\"") != std::string::npos);
}

TEST_CASE("an unreachable threshold yields all-negative predictions") {
  data::GeneratorSettings g;
  g.train_conversations = 2;
  g.dev_conversations = 1;
  g.test_conversations = 1;
  g.min_utterances = 3;
  g.max_utterances = 4;
  g.num_labels = 8;
  g.vocab_size = 16;
  g.base_dim = 4;
  g.num_topics = 2;
  g.num_acts = 4;
  g.mean_tokens = 3;
  g.mean_frames_per_token = 2;
  auto corpus = data::generate_corpus(g, 3);

  model::ModelConfig m;
  m.d_model = 8;
  m.feature_dim = 24;
  m.speech_layers = 1;
  m.speech_hidden = 4;
  m.vocab = 16;
  m.text_layers = 1;
  m.text_heads = 2;
  m.text_max_tokens = 8;
  m.conversation_layers = 1;
  m.conversation_heads = 1;
  m.n_max = 4;
  m.num_labels = 8;
  model::ModelParams params(m, 1);

  EvalSettings settings;
  settings.regime = model::Regime::kHierS;
  settings.n_max = 4;
  settings.threshold = 1.0 + 1e-9;  // sigmoid never reaches it
  auto report = evaluate(params, corpus.test, settings);
  CHECK(report.macro_f1 == 0.0);
  for (const auto& s : report.per_class) CHECK(s.predicted == 0);
}
