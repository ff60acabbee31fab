// hierconv/losses.hpp

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

#ifndef HIERCONV_LOSSES_HPP_
#define HIERCONV_LOSSES_HPP_

#include "hierconv/graph.hpp"
#include "hierconv/rng.hpp"

namespace hierconv::losses {

/// Shared classification head: one affine map d_model -> num_labels used by
/// both modality paths.
struct ClassifierParams {
  Tensor w;  // d_model x num_labels
  Tensor b;  // 1 x num_labels

  ClassifierParams(int d_model, int num_labels, const Rng& init);
  TensorRefs tensors() { return {&w, &b}; }
};

Graph::Id classify(Graph& g, ClassifierParams& params, Graph::Id embeddings);

struct LossWeights {
  double lambda_euc = 1.0;
  double lambda_con = 1.0;
  double tau = 0.07;

  void validate() const;  // throws ConfigError
};

/// Mean over batch and labels of the stable binary cross entropy.
/// Targets must be a binary matrix with the logits' shape.
Graph::Id bce_multilabel_node(Graph& g, Graph::Id logits, const Mat& targets);
double bce_multilabel(const Mat& logits, const Mat& targets);

/// Mean L2 distance between paired embeddings (one row per pair). The text
/// side is detached by default so gradients reach the speech branch only.
Graph::Id euclidean_loss_node(Graph& g, Graph::Id u_speech, Graph::Id u_text,
                              bool detach_text = true);
double euclidean_loss(const Mat& u_speech, const Mat& u_text);

/// Symmetric temperature-scaled cosine contrastive loss over a batch of
/// paired embeddings:
///   s_ij = cos(u_s[i], u_t[j]) / tau
///   loss = -(1/2B) sum_i [log softmax_row(s)_ii + log softmax_col(s)_ii].
/// The text side is detached by default. Throws NumericError, naming the
/// batch index, when an embedding has zero norm.
Graph::Id contrastive_loss_node(Graph& g, Graph::Id u_speech, Graph::Id u_text,
                                double tau, bool detach_text = true);
double contrastive_loss(const Mat& u_speech, const Mat& u_text, double tau);

}  // namespace hierconv::losses

#endif  // HIERCONV_LOSSES_HPP_
