// hierconv/model.hpp

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

#ifndef HIERCONV_MODEL_HPP_
#define HIERCONV_MODEL_HPP_

#include <string>
#include <vector>

#include "hierconv/conversation.hpp"
#include "hierconv/data.hpp"
#include "hierconv/encoders.hpp"
#include "hierconv/losses.hpp"

namespace hierconv::model {

enum class Regime { kHierST, kHierS, kHierT };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);
bool regime_uses_speech(Regime r);
bool regime_uses_text(Regime r);

struct ModelConfig {
  int d_model = 64;
  int feature_dim = 48;  // speech encoder input (post feature pipeline)
  int speech_layers = 2;
  int speech_hidden = 32;
  int vocab = 64;
  int text_layers = 2;
  int text_heads = 2;
  int text_max_tokens = 64;
  conversation::Variant conversation_variant = conversation::Variant::kTransformer;
  int conversation_layers = 2;
  int conversation_heads = 1;
  int n_max = 10;
  int num_labels = 16;
  bool use_speaker_role = false;
};

/// The three disjoint parameter buckets (speech theta_s, text theta_t,
/// shared conversation phi) plus the shared classifier head.
struct ModelParams {
  ModelConfig cfg;
  encoders::SpeechEncoderParams speech;
  encoders::TextEncoderParams text;
  conversation::ConversationEncoderParams shared_conversation;
  losses::ClassifierParams classifier;

  ModelParams(const ModelConfig& config, std::uint64_t seed);

  TensorRefs speech_tensors() { return speech.tensors(); }
  TensorRefs text_tensors() { return text.tensors(); }
  TensorRefs conversation_tensors() { return shared_conversation.tensors(); }
  TensorRefs classifier_tensors() { return classifier.tensors(); }
  TensorRefs all_tensors();
};

// ---------------------------------------------------------------------------
// Batched hierarchical forward pass. Batches are whole conversations: every
// utterance is encoded once and its embedding is shared by all context
// windows that include it.
// ---------------------------------------------------------------------------

struct BatchConversation {
  const data::Conversation* conv = nullptr;
  std::vector<Mat> features;  // per-utterance model-ready frames
};

struct ForwardOptions {
  Regime regime = Regime::kHierST;
  losses::LossWeights weights;
  bool training = false;  // build loss nodes
  nn::DropoutPlan dropout;
  bool tie_all_utterances = false;  // cross-modal losses on all positions
  int n_max = 10;
};

struct ForwardOutputs {
  Graph::Id speech_utts = -1;     // (U x d)
  Graph::Id text_utts = -1;       // (U x d)
  Graph::Id speech_context = -1;  // (C x d)
  Graph::Id text_context = -1;    // (C x d)
  Graph::Id speech_logits = -1;   // (C x L)
  Graph::Id text_logits = -1;     // (C x L)
  Graph::Id loss_total = -1;
  Graph::Id loss_bce_speech = -1;
  Graph::Id loss_bce_text = -1;
  Graph::Id loss_euclidean = -1;
  Graph::Id loss_contrastive = -1;
  Mat targets;  // (C x L)
  std::vector<const data::Utterance*> context_targets;
};

ForwardOutputs build_forward(Graph& g, ModelParams& params,
                             const std::vector<BatchConversation>& batch,
                             const ForwardOptions& options);

// ---------------------------------------------------------------------------
// Checkpoint container: binary, exact at 64-bit. Layout (little-endian):
//   magic "HCVCKPT1" | u64 json_len | config json | u64 tensor_count |
//   per tensor: u64 name_len | name | u64 rows | u64 cols |
//               rows*cols doubles in column-major order.
// ---------------------------------------------------------------------------

struct Checkpoint {
  std::string config_json;
  std::vector<std::pair<std::string, Mat>> tensors;
};

void save_checkpoint(const std::string& path, ModelParams& params,
                     const std::string& config_json);
Checkpoint load_checkpoint(const std::string& path);

/// Copies checkpoint values into an existing parameter set; every tensor
/// must be present with a matching shape, otherwise ConfigError.
void apply_checkpoint(ModelParams& params, const Checkpoint& ckpt);

}  // namespace hierconv::model

#endif  // HIERCONV_MODEL_HPP_
