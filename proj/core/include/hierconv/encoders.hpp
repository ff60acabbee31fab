// hierconv/encoders.hpp

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

#ifndef HIERCONV_ENCODERS_HPP_
#define HIERCONV_ENCODERS_HPP_

#include <string>
#include <vector>

#include "hierconv/features.hpp"
#include "hierconv/nn_blocks.hpp"

namespace hierconv::encoders {

using nn::DropoutPlan;

// ---------------------------------------------------------------------------
// Speech encoder: stacked bidirectional LSTM over acoustic frames. The
// utterance embedding is the last layer's forward state at the last frame
// concatenated with the backward state at the first frame, projected to
// d_model.
// ---------------------------------------------------------------------------

struct SpeechEncoderConfig {
  int input_dim = 48;  // post-pipeline feature dimension
  int layers = 2;
  int hidden = 32;  // cells per layer per direction
  int d_model = 64;
};

struct SpeechEncoderParams {
  SpeechEncoderConfig cfg;
  std::vector<nn::BiLstmLayerParams> layers;
  Tensor proj_w;  // 2*hidden x d_model
  Tensor proj_b;  // 1 x d_model

  SpeechEncoderParams(const SpeechEncoderConfig& config, const Rng& init);
  TensorRefs tensors();
};

/// Encodes a batch of utterances (padded internally to the longest) into a
/// (batch x d_model) embedding matrix node. Rows follow input order.
Graph::Id encode_speech_batch(Graph& g, SpeechEncoderParams& params,
                              const std::vector<const Mat*>& utterances,
                              const DropoutPlan& dropout = {});

/// Single-utterance convenience wrapper; returns the embedding values.
Mat encode_speech(const features::FeatureSequence& x, SpeechEncoderParams& params);

// ---------------------------------------------------------------------------
// Text encoder: token + learned position embeddings, a prepended
// classification token, a self-attention encoder stack; the classification
// position's output is the utterance embedding.
// ---------------------------------------------------------------------------

struct TextEncoderConfig {
  int vocab = 64;
  int d_model = 64;
  int layers = 2;
  int heads = 2;
  int max_tokens = 64;
};

struct TextEncoderParams {
  TextEncoderConfig cfg;
  Tensor token_emb;  // vocab x d_model
  Tensor pos_emb;    // (max_tokens + 1) x d_model, position 0 is the cls slot
  Tensor cls_emb;    // 1 x d_model
  std::vector<nn::TransformerLayerParams> layers;

  TextEncoderParams(const TextEncoderConfig& config, const Rng& init);
  TensorRefs tensors();
};

/// Encodes one token sequence into a (1 x d_model) embedding node.
/// Throws DataError for out-of-vocabulary ids or over-long sequences.
Graph::Id encode_text_node(Graph& g, TextEncoderParams& params,
                           const std::vector<int>& tokens,
                           const DropoutPlan& dropout = {});

/// Batch version: one row per token sequence, input order preserved.
Graph::Id encode_text_batch(Graph& g, TextEncoderParams& params,
                            const std::vector<const std::vector<int>*>& batch,
                            const DropoutPlan& dropout = {});

/// Single-utterance convenience wrapper; returns the embedding values.
Mat encode_text(const std::vector<int>& tokens, TextEncoderParams& params);

}  // namespace hierconv::encoders

#endif  // HIERCONV_ENCODERS_HPP_
