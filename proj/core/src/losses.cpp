// hierconv/losses.cpp

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

#include "hierconv/losses.hpp"

#include <cmath>
#include <string>

#include "hierconv/errors.hpp"
#include "hierconv/nn_blocks.hpp"

namespace hierconv::losses {

ClassifierParams::ClassifierParams(int d_model, int num_labels, const Rng& init)
    : w("classifier.w", d_model, num_labels), b("classifier.b", 1, num_labels) {
  if (d_model < 1 || num_labels < 1)
    throw ConfigError("classifier: sizes must be >= 1");
  nn::init_uniform(w, init, 1.0 / std::sqrt(static_cast<double>(d_model)));
  b.value.setZero();
}

Graph::Id classify(Graph& g, ClassifierParams& params, Graph::Id embeddings) {
  if (g.value(embeddings).cols() != params.w.value.rows())
    throw ConfigError("classify: embedding dim mismatch");
  return affine(g, embeddings, g.param(params.w), g.param(params.b));
}

void LossWeights::validate() const {
  if (lambda_euc < 0.0 || lambda_con < 0.0)
    throw ConfigError("loss weights must be >= 0");
  if (tau <= 0.0) throw ConfigError("temperature tau must be > 0");
}

Graph::Id bce_multilabel_node(Graph& g, Graph::Id logits, const Mat& targets) {
  for (Eigen::Index i = 0; i < targets.rows(); ++i)
    for (Eigen::Index j = 0; j < targets.cols(); ++j)
      if (targets(i, j) != 0.0 && targets(i, j) != 1.0)
        throw DataError("bce_multilabel: targets must be binary");
  return g.bce_with_logits_mean(logits, targets);
}

double bce_multilabel(const Mat& logits, const Mat& targets) {
  Graph g;
  return g.value(bce_multilabel_node(g, g.constant(logits), targets))(0, 0);
}

Graph::Id euclidean_loss_node(Graph& g, Graph::Id u_speech, Graph::Id u_text,
                              bool detach_text) {
  const auto B = g.value(u_speech).rows();
  if (B != g.value(u_text).rows() ||
      g.value(u_speech).cols() != g.value(u_text).cols())
    throw DataError("euclidean_loss: batch shape mismatch");
  Graph::Id t = detach_text ? g.detach(u_text) : u_text;
  Graph::Id diff = g.sub(u_speech, t);
  Graph::Id norms = g.sqrt(g.row_sums(g.emul(diff, diff)));
  return g.scale(g.sum_all(norms), 1.0 / static_cast<double>(B));
}

double euclidean_loss(const Mat& u_speech, const Mat& u_text) {
  Graph g;
  return g.value(euclidean_loss_node(g, g.constant(u_speech),
                                     g.constant(u_text)))(0, 0);
}

namespace {

void check_nonzero_rows(const Mat& m, const char* side) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (m.row(i).norm() < 1e-300)
      throw NumericError(std::string("contrastive_loss: zero-norm ") + side +
                         " embedding at batch index " + std::to_string(i));
}

Graph::Id l2_normalize_rows(Graph& g, Graph::Id x) {
  Graph::Id inv_norms = g.recip(g.sqrt(g.row_sums(g.emul(x, x))));
  return g.emul_colvec(x, inv_norms);
}

}  // namespace

Graph::Id contrastive_loss_node(Graph& g, Graph::Id u_speech, Graph::Id u_text,
                                double tau, bool detach_text) {
  if (tau <= 0.0) throw ConfigError("contrastive_loss: tau must be > 0");
  const auto B = g.value(u_speech).rows();
  if (B != g.value(u_text).rows() ||
      g.value(u_speech).cols() != g.value(u_text).cols())
    throw DataError("contrastive_loss: batch shape mismatch");
  check_nonzero_rows(g.value(u_speech), "speech");
  check_nonzero_rows(g.value(u_text), "text");

  Graph::Id t = detach_text ? g.detach(u_text) : u_text;
  Graph::Id ns = l2_normalize_rows(g, u_speech);
  Graph::Id nt = l2_normalize_rows(g, t);
  Graph::Id sim = g.scale(g.matmul(ns, g.transpose(nt)), 1.0 / tau);

  Graph::Id row_ll = g.diag_as_col(g.log_softmax_rows(sim));
  Graph::Id col_ll = g.diag_as_col(g.log_softmax_rows(g.transpose(sim)));
  Graph::Id total = g.add(g.sum_all(row_ll), g.sum_all(col_ll));
  return g.scale(total, -1.0 / (2.0 * static_cast<double>(B)));
}

double contrastive_loss(const Mat& u_speech, const Mat& u_text, double tau) {
  Graph g;
  return g.value(contrastive_loss_node(g, g.constant(u_speech),
                                       g.constant(u_text), tau))(0, 0);
}

}  // namespace hierconv::losses
