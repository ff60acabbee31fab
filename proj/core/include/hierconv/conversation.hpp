// hierconv/conversation.hpp

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

#ifndef HIERCONV_CONVERSATION_HPP_
#define HIERCONV_CONVERSATION_HPP_

#include <string>
#include <vector>

#include "hierconv/nn_blocks.hpp"

namespace hierconv::conversation {

using nn::DropoutPlan;

enum class Variant { kTransformer, kRecurrent };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ConversationEncoderConfig {
  Variant variant = Variant::kTransformer;
  int d_model = 64;
  int layers = 2;  // transformer variant
  int heads = 1;   // transformer variant
  int n_max = 10;  // maximum context length; sizes the position table
  bool use_speaker_role = false;
};

/// The shared conversation encoder phi. One instance serves both the speech
/// and the text path; sharing is by construction, there is no copy.
struct ConversationEncoderParams {
  ConversationEncoderConfig cfg;
  // Transformer variant.
  Tensor pos_emb;  // n_max x d_model
  std::vector<nn::TransformerLayerParams> layers;
  // Recurrent variant: one bidirectional layer, d_model cells per direction,
  // outputs pooled by addition.
  nn::BiLstmLayerParams recurrent;
  // Optional additive speaker-role embedding (off by default).
  Tensor role_emb;  // 2 x d_model when enabled, empty otherwise

  ConversationEncoderParams(const ConversationEncoderConfig& config,
                            const Rng& init);
  TensorRefs tensors();
};

/// Encodes an ordered context of utterance embeddings (length x d_model,
/// 1 <= length <= n_max) into a (1 x d_model) context embedding node.
/// roles, when speaker-role input is enabled, gives one role id (0 or 1) per
/// position. Throws DataError when the context is longer than n_max.
Graph::Id encode_context_node(Graph& g, ConversationEncoderParams& params,
                              Graph::Id utterance_embeddings,
                              const std::vector<int>& roles = {},
                              const DropoutPlan& dropout = {});

/// Convenience wrapper over values.
Mat encode_context(const Mat& utterance_embeddings,
                   ConversationEncoderParams& params,
                   const std::vector<int>& roles = {});

}  // namespace hierconv::conversation

#endif  // HIERCONV_CONVERSATION_HPP_
