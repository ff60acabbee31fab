// hierconv/config.hpp

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

#ifndef HIERCONV_CONFIG_HPP_
#define HIERCONV_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hierconv/model.hpp"
#include "hierconv/training.hpp"

namespace hierconv::config {

/// The experiment config file: JSON with groups {data, features, model,
/// losses, training, eval, ablate} plus top-level seed and output_dir.
/// Unknown keys anywhere are rejected; every field has a documented default.
struct ExperimentConfig {
  std::uint64_t seed = 12345;
  std::string output_dir = "runs/exp";

  // data
  std::string corpus_dir = "data/corpus";
  data::GeneratorSettings generator;

  // features
  int delta_window = 2;
  features::DropFrameConfig dropframe{256, true};

  // model
  int d_model = 64;
  int speech_layers = 2;
  int speech_hidden = 32;
  int text_layers = 2;
  int text_heads = 2;
  int text_max_tokens = 64;
  conversation::Variant conversation_variant =
      conversation::Variant::kTransformer;
  int conversation_layers = 2;
  int conversation_heads = 1;
  bool use_speaker_role = false;

  // losses
  losses::LossWeights weights;

  // training
  model::Regime regime = model::Regime::kHierST;
  double learning_rate = 1e-3;
  double dropout = 0.1;
  int batch_size = 16;
  int max_epochs = 50;
  int patience = 10;
  int n_max = 10;
  double grad_clip = 5.0;
  bool freeze_speech = false;
  bool freeze_text = false;
  bool log_train_f1 = true;
  bool tie_all_utterances = false;

  // eval
  double threshold = 0.5;
  std::string eval_split = "test";

  // ablate
  std::vector<std::uint64_t> ablate_seeds{1, 2, 3};
  std::vector<int> dropframe_lengths{16, 64, 256, 0};  // 0 = disabled
  int dropframe_epochs = 2;

  model::ModelConfig model_config() const;
  training::TrainingConfig training_config() const;
  void validate() const;

  /// Fully resolved config (defaults applied), reparseable by parse.
  std::string to_json_string() const;
};

ExperimentConfig parse(const std::string& json_text);
ExperimentConfig load_file(const std::string& path);

/// Applies scalar overrides of the form "group.key=value" (or "seed=7") to
/// raw config JSON text; values are parsed as JSON scalars with a string
/// fallback.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

}  // namespace hierconv::config

#endif  // HIERCONV_CONFIG_HPP_
