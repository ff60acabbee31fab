// hierconv/conversation.cpp

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

#include "hierconv/conversation.hpp"

#include <cmath>
#include <numeric>

#include "hierconv/errors.hpp"

namespace hierconv::conversation {

std::string variant_name(Variant v) {
  return v == Variant::kTransformer ? "transformer" : "recurrent";
}

Variant variant_from_name(const std::string& name) {
  if (name == "transformer") return Variant::kTransformer;
  if (name == "recurrent" || name == "lstm") return Variant::kRecurrent;
  throw ConfigError("unknown conversation encoder variant '" + name + "'");
}

ConversationEncoderParams::ConversationEncoderParams(
    const ConversationEncoderConfig& config, const Rng& init)
    : cfg(config) {
  if (cfg.d_model < 1 || cfg.n_max < 1)
    throw ConfigError("conversation encoder: sizes must be >= 1");
  if (cfg.variant == Variant::kTransformer) {
    if (cfg.layers < 1 || cfg.heads < 1)
      throw ConfigError("conversation encoder: layers and heads must be >= 1");
    if (cfg.d_model % cfg.heads != 0)
      throw ConfigError("conversation encoder: heads must divide d_model");
    pos_emb = Tensor("conv.pos_emb", cfg.n_max, cfg.d_model);
    nn::init_uniform(pos_emb, init, 0.5);
    layers.reserve(static_cast<std::size_t>(cfg.layers));
    for (int l = 0; l < cfg.layers; ++l) {
      layers.emplace_back("conv.l" + std::to_string(l), cfg.d_model);
      nn::init_transformer_layer(layers.back(), init);
    }
  } else {
    recurrent = nn::BiLstmLayerParams("conv.rec", cfg.d_model, cfg.d_model);
    nn::init_lstm_dir(recurrent.fwd, init);
    nn::init_lstm_dir(recurrent.bwd, init);
  }
  if (cfg.use_speaker_role) {
    role_emb = Tensor("conv.role_emb", 2, cfg.d_model);
    nn::init_uniform(role_emb, init, 0.5);
  }
}

TensorRefs ConversationEncoderParams::tensors() {
  TensorRefs out;
  if (cfg.variant == Variant::kTransformer) {
    out.push_back(&pos_emb);
    for (auto& l : layers) l.collect(out);
  } else {
    recurrent.collect(out);
  }
  if (cfg.use_speaker_role) out.push_back(&role_emb);
  return out;
}

Graph::Id encode_context_node(Graph& g, ConversationEncoderParams& params,
                              Graph::Id utterance_embeddings,
                              const std::vector<int>& roles,
                              const DropoutPlan& dropout) {
  const auto len = g.value(utterance_embeddings).rows();
  if (len < 1) throw DataError("encode_context: empty context");
  if (len > params.cfg.n_max)
    throw DataError("encode_context: context of length " + std::to_string(len) +
                    " exceeds n_max=" + std::to_string(params.cfg.n_max));
  if (g.value(utterance_embeddings).cols() != params.cfg.d_model)
    throw ConfigError("encode_context: embedding dim mismatch");

  Graph::Id x = utterance_embeddings;
  if (params.cfg.use_speaker_role) {
    if (static_cast<Eigen::Index>(roles.size()) != len)
      throw DataError("encode_context: one role id per position required");
    x = g.add(x, g.rows(g.param(params.role_emb), roles));
  }

  if (params.cfg.variant == Variant::kTransformer) {
    std::vector<int> pos_idx(static_cast<std::size_t>(len));
    std::iota(pos_idx.begin(), pos_idx.end(), 0);
    x = g.add(x, g.rows(g.param(params.pos_emb), pos_idx));
    for (auto& layer : params.layers)
      x = nn::transformer_layer(g, layer, x, params.cfg.heads, dropout);
    return g.rows(x, {static_cast<int>(len) - 1});
  }

  // Recurrent variant: a batch of one sequence; each timestep is one row.
  std::vector<Graph::Id> steps, masks;
  steps.reserve(static_cast<std::size_t>(len));
  const Graph::Id one = g.constant(Mat::Ones(1, 1));
  for (Eigen::Index t = 0; t < len; ++t) {
    steps.push_back(g.rows(x, {static_cast<int>(t)}));
    masks.push_back(one);
  }
  nn::BiLstmOutput out = nn::bilstm_layer(g, params.recurrent, steps, masks);
  return g.add(out.final_fwd, out.final_bwd);
}

Mat encode_context(const Mat& utterance_embeddings,
                   ConversationEncoderParams& params,
                   const std::vector<int>& roles) {
  Graph g;
  Graph::Id out =
      encode_context_node(g, params, g.constant(utterance_embeddings), roles);
  return g.value(out);
}

}  // namespace hierconv::conversation
