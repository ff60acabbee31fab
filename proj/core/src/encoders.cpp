// hierconv/encoders.cpp

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

#include "hierconv/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hierconv/errors.hpp"

namespace hierconv::encoders {

SpeechEncoderParams::SpeechEncoderParams(const SpeechEncoderConfig& config,
                                         const Rng& init)
    : cfg(config),
      proj_w("speech.proj_w", 2 * config.hidden, config.d_model),
      proj_b("speech.proj_b", 1, config.d_model) {
  if (cfg.input_dim < 1 || cfg.layers < 1 || cfg.hidden < 1 || cfg.d_model < 1)
    throw ConfigError("speech encoder: all sizes must be >= 1");
  layers.reserve(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) {
    const int in_dim = l == 0 ? cfg.input_dim : 2 * cfg.hidden;
    layers.emplace_back("speech.l" + std::to_string(l), in_dim, cfg.hidden);
    nn::init_lstm_dir(layers.back().fwd, init);
    nn::init_lstm_dir(layers.back().bwd, init);
  }
  nn::init_uniform(proj_w, init, 1.0 / std::sqrt(2.0 * cfg.hidden));
  proj_b.value.setZero();
}

TensorRefs SpeechEncoderParams::tensors() {
  TensorRefs out;
  for (auto& l : layers) l.collect(out);
  out.push_back(&proj_w);
  out.push_back(&proj_b);
  return out;
}

Graph::Id encode_speech_batch(Graph& g, SpeechEncoderParams& params,
                              const std::vector<const Mat*>& utterances,
                              const DropoutPlan& dropout) {
  if (utterances.empty()) throw DataError("encode_speech_batch: empty batch");
  const auto B = static_cast<Eigen::Index>(utterances.size());
  Eigen::Index t_max = 0;
  for (const Mat* u : utterances) {
    if (u->cols() != params.cfg.input_dim)
      throw ConfigError("speech encoder: expected feature dim " +
                        std::to_string(params.cfg.input_dim) + ", got " +
                        std::to_string(u->cols()));
    if (u->rows() < 1) throw DataError("speech encoder: empty utterance");
    t_max = std::max(t_max, u->rows());
  }

  // Padded time-major constants: one (B x D) input and one (B x 1) mask per
  // timestep.
  std::vector<Graph::Id> inputs, masks;
  inputs.reserve(static_cast<std::size_t>(t_max));
  masks.reserve(static_cast<std::size_t>(t_max));
  for (Eigen::Index t = 0; t < t_max; ++t) {
    Mat x = Mat::Zero(B, params.cfg.input_dim);
    Mat m = Mat::Zero(B, 1);
    for (Eigen::Index b = 0; b < B; ++b) {
      if (t < utterances[static_cast<std::size_t>(b)]->rows()) {
        x.row(b) = utterances[static_cast<std::size_t>(b)]->row(t);
        m(b, 0) = 1.0;
      }
    }
    inputs.push_back(g.constant(std::move(x)));
    masks.push_back(g.constant(std::move(m)));
  }

  std::vector<Graph::Id> layer_in = inputs;
  nn::BiLstmOutput top;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    top = nn::bilstm_layer(g, params.layers[l], layer_in, masks);
    if (l + 1 < params.layers.size()) {
      layer_in.clear();
      layer_in.reserve(top.step_h.size());
      for (Graph::Id h : top.step_h)
        layer_in.push_back(nn::apply_dropout(g, h, dropout));
    }
  }

  Graph::Id state = g.concat_cols({top.final_fwd, top.final_bwd});
  return affine(g, state, g.param(params.proj_w), g.param(params.proj_b));
}

Mat encode_speech(const features::FeatureSequence& x, SpeechEncoderParams& params) {
  Graph g;
  Graph::Id out = encode_speech_batch(g, params, {&x.frames});
  return g.value(out);
}

TextEncoderParams::TextEncoderParams(const TextEncoderConfig& config,
                                     const Rng& init)
    : cfg(config),
      token_emb("text.token_emb", config.vocab, config.d_model),
      pos_emb("text.pos_emb", config.max_tokens + 1, config.d_model),
      cls_emb("text.cls_emb", 1, config.d_model) {
  if (cfg.vocab < 1 || cfg.d_model < 1 || cfg.layers < 1 || cfg.heads < 1 ||
      cfg.max_tokens < 1)
    throw ConfigError("text encoder: all sizes must be >= 1");
  if (cfg.d_model % cfg.heads != 0)
    throw ConfigError("text encoder: heads must divide d_model");
  layers.reserve(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) {
    layers.emplace_back("text.l" + std::to_string(l), cfg.d_model);
    nn::init_transformer_layer(layers.back(), init);
  }
  nn::init_uniform(token_emb, init, 0.5);
  nn::init_uniform(pos_emb, init, 0.5);
  nn::init_uniform(cls_emb, init, 0.5);
}

TensorRefs TextEncoderParams::tensors() {
  TensorRefs out{&token_emb, &pos_emb, &cls_emb};
  for (auto& l : layers) l.collect(out);
  return out;
}

Graph::Id encode_text_node(Graph& g, TextEncoderParams& params,
                           const std::vector<int>& tokens,
                           const DropoutPlan& dropout) {
  if (tokens.empty()) throw DataError("encode_text: empty token sequence");
  if (static_cast<int>(tokens.size()) > params.cfg.max_tokens)
    throw DataError("encode_text: sequence of " + std::to_string(tokens.size()) +
                    " tokens exceeds max_tokens=" +
                    std::to_string(params.cfg.max_tokens));
  for (int t : tokens)
    if (t < 0 || t >= params.cfg.vocab)
      throw DataError("encode_text: token id " + std::to_string(t) +
                      " outside vocabulary of size " +
                      std::to_string(params.cfg.vocab));

  const int n = static_cast<int>(tokens.size());
  Graph::Id tok = g.rows(g.param(params.token_emb), tokens);
  Graph::Id x = g.concat_rows({g.param(params.cls_emb), tok});
  std::vector<int> pos_idx(static_cast<std::size_t>(n) + 1);
  std::iota(pos_idx.begin(), pos_idx.end(), 0);
  x = g.add(x, g.rows(g.param(params.pos_emb), pos_idx));
  for (auto& layer : params.layers)
    x = nn::transformer_layer(g, layer, x, params.cfg.heads, dropout);
  return g.rows(x, {0});
}

Graph::Id encode_text_batch(Graph& g, TextEncoderParams& params,
                            const std::vector<const std::vector<int>*>& batch,
                            const DropoutPlan& dropout) {
  if (batch.empty()) throw DataError("encode_text_batch: empty batch");
  std::vector<Graph::Id> rows_out;
  rows_out.reserve(batch.size());
  for (const auto* tokens : batch)
    rows_out.push_back(encode_text_node(g, params, *tokens, dropout));
  return rows_out.size() == 1 ? rows_out[0] : g.concat_rows(rows_out);
}

Mat encode_text(const std::vector<int>& tokens, TextEncoderParams& params) {
  Graph g;
  Graph::Id out = encode_text_node(g, params, tokens);
  return g.value(out);
}

}  // namespace hierconv::encoders
