// hierconv/training.hpp

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

#ifndef HIERCONV_TRAINING_HPP_
#define HIERCONV_TRAINING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hierconv/model.hpp"

namespace hierconv::training {

struct TrainingConfig {
  model::Regime regime = model::Regime::kHierST;
  double learning_rate = 1e-3;
  double dropout = 0.1;
  int batch_size = 16;  // target contexts per batch; whole conversations
  int max_epochs = 50;
  int patience = 10;
  int n_max = 10;
  features::DropFrameConfig dropframe;
  losses::LossWeights weights;
  std::uint64_t seed = 12345;
  bool freeze_speech = false;
  bool freeze_text = false;
  double grad_clip = 5.0;  // global norm; 0 disables
  bool log_train_f1 = true;
  bool tie_all_utterances = false;
  int delta_window = 2;
  double eval_threshold = 0.5;

  void validate() const;  // throws ConfigError
};

struct EpochRecord {
  int epoch = 0;
  double bce_speech = 0.0;
  double bce_text = 0.0;
  double euclidean = 0.0;
  double contrastive = 0.0;
  double total = 0.0;
  double train_macro_f1 = -1.0;  // -1 when logging is off
  double dev_macro_f1 = 0.0;
  double wall_time_s = 0.0;  // training phase only, excludes dev evaluation
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_dev_f1 = 0.0;
};

/// Early stopping on a to-be-maximized metric. Stops once `patience` epochs
/// pass without strict improvement over the best seen value.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  /// Returns true when training should stop after this observation.
  bool observe(int epoch, double metric) {
    if (metric > best_) {
      best_ = metric;
      best_epoch_ = epoch;
    }
    return epoch - best_epoch_ >= patience_;
  }

  int best_epoch() const { return best_epoch_; }
  double best_metric() const { return best_; }

 private:
  int patience_;
  int best_epoch_ = -1;
  double best_ = -1e300;
};

/// Adam with bias correction, applied to a fixed tensor subset in list order.
class Adam {
 public:
  Adam(TensorRefs params, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8);

  /// Consumes the gradients currently stored in the tensors. Optionally
  /// rescales them first so their global norm is at most `clip` (0 = off).
  void step(double clip = 0.0);

  const TensorRefs& params() const { return params_; }

 private:
  TensorRefs params_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Mat> m_, v_;
};

// ---------------------------------------------------------------------------
// Corpus preparation shared by training and evaluation.
// ---------------------------------------------------------------------------

struct PreparedCorpus {
  std::vector<std::vector<Mat>> features;  // [conversation][utterance]
  int feature_dim = 0;
};

/// Runs the delta + stacking pipeline once per utterance.
PreparedCorpus prepare_features(const data::Corpus& corpus, int delta_window);

/// Packs whole conversations into batches of at least `batch_contexts`
/// contexts (the last batch may be smaller). Order follows `order`.
std::vector<std::vector<int>> pack_batches(const data::Corpus& corpus,
                                           const std::vector<int>& order,
                                           int batch_contexts);

/// The parameter subset the optimizer may touch for a regime, minus frozen
/// encoders. The classifier and the shared conversation encoder are always
/// included.
TensorRefs trainable_tensors(model::ModelParams& params, model::Regime regime,
                             bool freeze_speech, bool freeze_text);

/// Mini-batch Adam over the three regimes with early stopping on dev
/// macro-F1. The model is left holding the best epoch's parameters.
/// Deterministic given config.seed.
TrainResult train(model::ModelParams& params, const data::Corpus& train_split,
                  const data::Corpus& dev_split, const TrainingConfig& config);

// ---------------------------------------------------------------------------
// DropFrame timing benchmark: trains for a fixed number of epochs per
// setting and reports seconds per epoch and resulting dev macro-F1.
// ---------------------------------------------------------------------------

struct DropFrameBenchRow {
  std::string label;     // "16", "256", "off", ...
  int max_len = 0;       // 0 when disabled
  bool enabled = false;
  double seconds_per_epoch = 0.0;  // min over measured epochs
  double mean_seconds_per_epoch = 0.0;
  double dev_macro_f1 = 0.0;
};

std::vector<DropFrameBenchRow> benchmark_dropframe(
    const model::ModelConfig& model_config, const TrainingConfig& base_config,
    const data::Corpus& train_split, const data::Corpus& dev_split,
    const std::vector<int>& l_values,  // <= 0 means disabled
    int epochs);

}  // namespace hierconv::training

#endif  // HIERCONV_TRAINING_HPP_
