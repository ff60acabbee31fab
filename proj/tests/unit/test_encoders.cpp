// tests/unit/test_encoders.cpp

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

#include "hierconv/encoders.hpp"
#include "hierconv/errors.hpp"
#include "hierconv/gradcheck.hpp"
#include "oracles.hpp"

using namespace hierconv;
using namespace hierconv::encoders;

namespace {

Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

SpeechEncoderConfig small_speech_cfg() {
  SpeechEncoderConfig cfg;
  cfg.input_dim = 6;
  cfg.layers = 2;
  cfg.hidden = 3;
  cfg.d_model = 4;
  return cfg;
}

TextEncoderConfig small_text_cfg() {
  TextEncoderConfig cfg;
  cfg.vocab = 11;
  cfg.d_model = 4;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.max_tokens = 8;
  return cfg;
}

}  // namespace

TEST_CASE("speech encoder handles a single frame and emits d_model") {
  SpeechEncoderParams p(small_speech_cfg(), Rng(4).child("init.speech"));
  features::FeatureSequence x;
  Rng rng(5);
  x.frames = random_mat(rng, 1, 6);
  Mat emb = encode_speech(x, p);
  CHECK(emb.rows() == 1);
  CHECK(emb.cols() == 4);
  CHECK(emb.allFinite());
}

TEST_CASE("zero speech parameters give a zero embedding") {
  SpeechEncoderParams p(small_speech_cfg(), Rng(4).child("init.speech"));
  for (Tensor* t : p.tensors()) t->value.setZero();
  features::FeatureSequence x;
  Rng rng(6);
  x.frames = random_mat(rng, 5, 6);
  CHECK(encode_speech(x, p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("speech encoder matches the frozen golden vector") {
  SpeechEncoderConfig cfg = small_speech_cfg();
  cfg.layers = 1;
  SpeechEncoderParams p(cfg, Rng(999).child("golden.speech"));
  Rng in(1000);
  features::FeatureSequence x;
  x.frames = random_mat(in, 3, 6);
  const double golden[4] = {0.17060827835264422, -0.048118867043088986,
                            -0.0098555137033523588, -0.011111781617608479};
  Mat emb = encode_speech(x, p);
  for (int j = 0; j < 4; ++j)
    CHECK(emb(0, j) == doctest::Approx(golden[j]).epsilon(1e-12));
}

TEST_CASE("batched ragged speech encoding matches the naive recurrence") {
  SpeechEncoderParams p(small_speech_cfg(), Rng(21).child("init.speech"));
  Rng rng(22);
  std::vector<Mat> utts;
  for (int t : {1, 4, 7, 2, 5}) utts.push_back(random_mat(rng, t, 6));
  std::vector<const Mat*> ptrs;
  for (const auto& u : utts) ptrs.push_back(&u);

  Graph g;
  Graph::Id out = encode_speech_batch(g, p, ptrs);
  const Mat& batched = g.value(out);
  REQUIRE(batched.rows() == 5);
  for (int b = 0; b < 5; ++b) {
    auto ref = oracle::speech_encoder(p, utts[static_cast<std::size_t>(b)]);
    Mat row = batched.row(b);
    CHECK(oracle::max_abs_diff(ref, row) < 1e-10);
  }
}

TEST_CASE("batch membership does not change a speech embedding") {
  // Padding plus masks must make each row independent of its batch mates.
  SpeechEncoderParams p(small_speech_cfg(), Rng(31).child("init.speech"));
  Rng rng(32);
  Mat a = random_mat(rng, 2, 6), b = random_mat(rng, 9, 6);
  Graph g1, g2, g3;
  Mat together = g1.value(encode_speech_batch(g1, p, {&a, &b}));
  Mat alone_a = g2.value(encode_speech_batch(g2, p, {&a}));
  Mat alone_b = g3.value(encode_speech_batch(g3, p, {&b}));
  CHECK((together.row(0) - alone_a.row(0)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((together.row(1) - alone_b.row(0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("speech encoder gradients pass finite differences per tensor") {
  SpeechEncoderParams p(small_speech_cfg(), Rng(41).child("init.speech"));
  Rng rng(42);
  Mat a = random_mat(rng, 4, 6), b = random_mat(rng, 2, 6);
  const Mat probe = random_mat(rng, 2, 4);

  auto build = [&](Graph& g) {
    Graph::Id emb = encode_speech_batch(g, p, {&a, &b});
    return g.sum_all(g.emul(emb, g.constant(probe)));
  };
  TensorRefs ts = p.tensors();
  zero_grads(ts);
  {
    Graph g;
    g.backward(build(g));
  }
  auto forward = [&]() {
    Graph g;
    return g.value(build(g))(0, 0);
  };
  auto report = fd_compare(ts, forward);
  for (const auto& e : report.entries) {
    INFO("tensor ", e.tensor, " rel_error ", e.rel_error);
    CHECK(e.pass);
  }
}

TEST_CASE("speech encoder rejects wrong feature dimension") {
  SpeechEncoderParams p(small_speech_cfg(), Rng(51).child("init.speech"));
  Rng rng(52);
  Mat wrong = random_mat(rng, 3, 5);
  Graph g;
  CHECK_THROWS_AS(encode_speech_batch(g, p, {&wrong}), ConfigError);
}

TEST_CASE("text encoder emits d_model for a single token") {
  TextEncoderParams p(small_text_cfg(), Rng(61).child("init.text"));
  Mat emb = encode_text({5}, p);
  CHECK(emb.rows() == 1);
  CHECK(emb.cols() == 4);
  CHECK(emb.allFinite());
}

TEST_CASE("permuting tokens changes the text embedding") {
  TextEncoderParams p(small_text_cfg(), Rng(62).child("init.text"));
  Mat a = encode_text({1, 2, 3, 4}, p);
  Mat b = encode_text({4, 3, 2, 1}, p);
  CHECK((a - b).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("text encoder matches the frozen golden vector") {
  TextEncoderConfig cfg = small_text_cfg();
  cfg.layers = 1;
  TextEncoderParams p(cfg, Rng(999).child("golden.text"));
  const double golden[4] = {-0.94962350652229777, -1.0430782106026577,
                            1.1075633924401467, 0.88513832468480891};
  Mat emb = encode_text({3, 7, 1}, p);
  for (int j = 0; j < 4; ++j)
    CHECK(emb(0, j) == doctest::Approx(golden[j]).epsilon(1e-12));
}

TEST_CASE("text encoder matches the naive attention computation") {
  TextEncoderParams p(small_text_cfg(), Rng(63).child("init.text"));
  Rng rng(64);
  for (int c = 0; c < 5; ++c) {
    std::vector<int> tokens;
    const int n = 1 + rng.uniform_int(7);
    for (int i = 0; i < n; ++i) tokens.push_back(rng.uniform_int(11));
    auto ref = oracle::text_encoder(p, tokens);
    Mat emb = encode_text(tokens, p);
    CHECK(oracle::max_abs_diff(ref, emb) < 1e-10);
  }
}

TEST_CASE("out-of-vocabulary and over-long inputs are data errors") {
  TextEncoderParams p(small_text_cfg(), Rng(65).child("init.text"));
  Graph g;
  CHECK_THROWS_AS(encode_text_node(g, p, {11}), DataError);
  CHECK_THROWS_AS(encode_text_node(g, p, {-1}), DataError);
  CHECK_THROWS_AS(encode_text_node(g, p, {}), DataError);
  std::vector<int> too_long(9, 1);
  CHECK_THROWS_AS(encode_text_node(g, p, too_long), DataError);
}

TEST_CASE("text encoder gradients pass finite differences per tensor") {
  TextEncoderParams p(small_text_cfg(), Rng(71).child("init.text"));
  Rng rng(72);
  const Mat probe = random_mat(rng, 2, 4);
  std::vector<int> t1{3, 9, 0}, t2{4};

  auto build = [&](Graph& g) {
    Graph::Id emb = encode_text_batch(g, p, {&t1, &t2});
    return g.sum_all(g.emul(emb, g.constant(probe)));
  };
  TensorRefs ts = p.tensors();
  zero_grads(ts);
  {
    Graph g;
    g.backward(build(g));
  }
  auto forward = [&]() {
    Graph g;
    return g.value(build(g))(0, 0);
  };
  auto report = fd_compare(ts, forward);
  for (const auto& e : report.entries) {
    INFO("tensor ", e.tensor, " rel_error ", e.rel_error);
    CHECK(e.pass);
  }
}

TEST_CASE("both encoders project into the same embedding space") {
  SpeechEncoderParams sp(small_speech_cfg(), Rng(81).child("init.speech"));
  TextEncoderParams tp(small_text_cfg(), Rng(81).child("init.text"));
  Rng rng(82);
  features::FeatureSequence x;
  x.frames = random_mat(rng, 4, 6);
  CHECK(encode_speech(x, sp).cols() == encode_text({1, 2}, tp).cols());
}
