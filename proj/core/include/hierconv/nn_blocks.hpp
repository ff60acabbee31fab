// hierconv/nn_blocks.hpp

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

#ifndef HIERCONV_NN_BLOCKS_HPP_
#define HIERCONV_NN_BLOCKS_HPP_

#include <string>
#include <vector>

#include "hierconv/graph.hpp"
#include "hierconv/rng.hpp"

namespace hierconv::nn {

/// Inverted dropout. Inactive when rate == 0 or rng == nullptr (eval mode).
/// Masks are drawn from *rng in graph-construction order, so a fixed rng
/// state reproduces the exact stochastic forward pass.
struct DropoutPlan {
  double rate = 0.0;
  Rng* rng = nullptr;

  bool active() const { return rate > 0.0 && rng != nullptr; }
};

Graph::Id apply_dropout(Graph& g, Graph::Id x, const DropoutPlan& plan);

// ---------------------------------------------------------------------------
// LSTM building block. Gate layout along the 4h axis: input, forget, cell,
// output. Weights are stored input-major (x * w_ih + h * w_hh + bias).
// ---------------------------------------------------------------------------

struct LstmDirParams {
  Tensor w_ih;  // in x 4h
  Tensor w_hh;  // h x 4h
  Tensor bias;  // 1 x 4h

  LstmDirParams() = default;
  LstmDirParams(const std::string& prefix, int in_dim, int hidden);
  int hidden() const { return static_cast<int>(w_hh.value.rows()); }
  void collect(TensorRefs& out);
};

struct BiLstmLayerParams {
  LstmDirParams fwd, bwd;

  BiLstmLayerParams() = default;
  BiLstmLayerParams(const std::string& prefix, int in_dim, int hidden)
      : fwd(prefix + ".fwd", in_dim, hidden), bwd(prefix + ".bwd", in_dim, hidden) {}
  void collect(TensorRefs& out) {
    fwd.collect(out);
    bwd.collect(out);
  }
};

/// One direction over a padded time-major batch. inputs[t] is a (B x in)
/// node; step_masks[t] is a (B x 1) node with 1 for rows where t is a valid
/// frame. Rows carry their state through masked steps, so the final state
/// equals the state at each row's own last valid frame (forward) or first
/// frame (reverse).
struct LstmDirOutput {
  std::vector<Graph::Id> step_h;  // per timestep, input order
  Graph::Id final_h = -1;         // B x h
};

LstmDirOutput lstm_direction(Graph& g, LstmDirParams& p,
                             const std::vector<Graph::Id>& inputs,
                             const std::vector<Graph::Id>& step_masks,
                             bool reverse);

/// Full bidirectional layer; step outputs are fwd || bwd per timestep.
struct BiLstmOutput {
  std::vector<Graph::Id> step_h;  // per timestep, (B x 2h)
  Graph::Id final_fwd = -1;       // B x h
  Graph::Id final_bwd = -1;       // B x h
};

BiLstmOutput bilstm_layer(Graph& g, BiLstmLayerParams& p,
                          const std::vector<Graph::Id>& inputs,
                          const std::vector<Graph::Id>& step_masks);

// ---------------------------------------------------------------------------
// Post-layer-norm transformer encoder layer with ReLU feed-forward of width
// 4 * d_model.
// ---------------------------------------------------------------------------

struct TransformerLayerParams {
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ff_w1, ff_b1, ff_w2, ff_b2;
  Tensor ln1_g, ln1_b, ln2_g, ln2_b;

  TransformerLayerParams() = default;
  TransformerLayerParams(const std::string& prefix, int d_model);
  void collect(TensorRefs& out);
};

/// Applies one encoder layer to x (seq_len x d_model); heads must divide
/// d_model.
Graph::Id transformer_layer(Graph& g, TransformerLayerParams& p, Graph::Id x,
                            int heads, const DropoutPlan& dropout);

// ---------------------------------------------------------------------------
// Deterministic initialization. Every tensor is seeded from its own name so
// construction order cannot perturb the values.
// ---------------------------------------------------------------------------

void init_uniform(Tensor& t, const Rng& base, double bound);
void init_lstm_dir(LstmDirParams& p, const Rng& base);
void init_transformer_layer(TransformerLayerParams& p, const Rng& base);

}  // namespace hierconv::nn

#endif  // HIERCONV_NN_BLOCKS_HPP_
