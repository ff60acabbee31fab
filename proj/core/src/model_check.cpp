// hierconv/model_check.cpp

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

#include <chrono>

#include "hierconv/gradcheck.hpp"
#include "hierconv/training.hpp"

namespace hierconv {

namespace {

Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

data::GeneratorSettings toy_generator() {
  data::GeneratorSettings s;
  s.train_conversations = 1;
  s.dev_conversations = 1;
  s.test_conversations = 1;
  s.min_utterances = 3;
  s.max_utterances = 3;  // three contexts
  s.num_labels = 4;
  s.vocab_size = 12;
  s.base_dim = 2;
  s.num_topics = 2;
  s.num_acts = 3;
  s.mean_tokens = 3;
  s.mean_frames_per_token = 2;  // <= 12 base frames -> <= 6 after stacking
  s.p_hist = 0.5;
  return s;
}

model::ModelConfig toy_model(const data::GeneratorSettings& gen,
                             conversation::Variant variant) {
  model::ModelConfig m;
  m.d_model = 8;
  m.feature_dim = 6 * gen.base_dim;
  m.speech_layers = 1;
  m.speech_hidden = 4;
  m.vocab = gen.vocab_size;
  m.text_layers = 1;
  m.text_heads = 2;
  m.text_max_tokens = 8;
  m.conversation_variant = variant;
  m.conversation_layers = 1;
  m.conversation_heads = 1;
  m.n_max = 3;
  m.num_labels = gen.num_labels;
  return m;
}

void append(ModelCheckReport& report, const std::string& check,
            const GradCheckReport& sub) {
  for (const auto& e : sub.entries)
    report.entries.push_back({check, e.tensor, e.rel_error, e.pass});
}

void check_into(ModelCheckReport& report, const std::string& name,
                TensorRefs tensors,
                const std::function<Graph::Id(Graph&)>& build, double step,
                double tol) {
  zero_grads(tensors);
  {
    Graph g;
    g.backward(build(g));
  }
  auto forward = [&]() {
    Graph g;
    return g.value(build(g))(0, 0);
  };
  append(report, name, fd_compare(tensors, forward, step, tol));
}

}  // namespace

ModelCheckReport check_model_gradients(std::uint64_t seed,
                                       conversation::Variant variant,
                                       double step, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  ModelCheckReport report;
  Rng rng(seed);

  // ---- individual losses on synthetic embedding batches (|B| = 3) ----
  {
    Tensor u_s("loss.u_speech", 3, 8), u_t("loss.u_text", 3, 8);
    u_s.value = random_mat(rng, 3, 8);
    u_t.value = random_mat(rng, 3, 8);
    Tensor logits("loss.logits", 3, 4);
    logits.value = random_mat(rng, 3, 4);
    Mat targets(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) targets(i, j) = rng.uniform_int(2);

    check_into(report, "bce", {&logits},
               [&](Graph& g) {
                 return g.bce_with_logits_mean(g.param(logits), targets);
               },
               step, tol);
    check_into(report, "euclidean", {&u_s},
               [&](Graph& g) {
                 return losses::euclidean_loss_node(g, g.param(u_s), g.param(u_t));
               },
               step, tol);
    check_into(report, "contrastive", {&u_s},
               [&](Graph& g) {
                 return losses::contrastive_loss_node(g, g.param(u_s),
                                                      g.param(u_t), 0.07);
               },
               step, tol);
    check_into(report, "contrastive-undetached", {&u_s, &u_t},
               [&](Graph& g) {
                 return losses::contrastive_loss_node(
                     g, g.param(u_s), g.param(u_t), 0.07, /*detach_text=*/false);
               },
               step, tol);
  }

  // ---- composed model on a toy conversation ----
  const auto gen = toy_generator();
  const auto corpus = data::generate_corpus(gen, seed ^ 0xabcdef);
  const auto& conv = corpus.train.conversations[0];
  const auto prepared = training::prepare_features(corpus.train, 2);

  model::ModelParams params(toy_model(gen, variant), seed);
  model::BatchConversation item;
  item.conv = &conv;
  item.features = prepared.features[0];

  auto composed = [&](Graph& g, double lam_euc, double lam_con) {
    model::ForwardOptions opts;
    opts.regime = model::Regime::kHierST;
    opts.training = true;
    opts.n_max = 3;
    opts.weights.lambda_euc = lam_euc;
    opts.weights.lambda_con = lam_con;
    return model::build_forward(g, params, {item}, opts).loss_total;
  };

  check_into(report, "composed-bce", params.all_tensors(),
             [&](Graph& g) { return composed(g, 0.0, 0.0); }, step, tol);

  TensorRefs non_text = params.speech_tensors();
  for (Tensor* t : params.conversation_tensors()) non_text.push_back(t);
  for (Tensor* t : params.classifier_tensors()) non_text.push_back(t);
  check_into(report, "composed-crossmodal", non_text,
             [&](Graph& g) { return composed(g, 1.0, 1.0); }, step, tol);

  // ---- exact stop-gradient through the real encoders ----
  {
    TensorRefs all = params.all_tensors();
    zero_grads(all);
    Graph g;
    std::vector<const Mat*> feats;
    std::vector<const std::vector<int>*> tokens;
    for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
      feats.push_back(&item.features[i]);
      tokens.push_back(&conv.utterances[i].transcript->tokens);
    }
    Graph::Id u_s = encoders::encode_speech_batch(g, params.speech, feats);
    Graph::Id u_t = encoders::encode_text_batch(g, params.text, tokens);
    Graph::Id loss = g.add(losses::euclidean_loss_node(g, u_s, u_t),
                           losses::contrastive_loss_node(g, u_s, u_t, 0.07));
    g.backward(loss);
    report.stop_gradient_exact = grad_sq_norm(params.text_tensors()) == 0.0;
    report.speech_grad_nonzero = grad_sq_norm(params.speech_tensors()) > 0.0;
  }

  report.all_pass = report.stop_gradient_exact && report.speech_grad_nonzero;
  for (const auto& e : report.entries) report.all_pass = report.all_pass && e.pass;
  report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace hierconv
