// hierconv/training.cpp

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

#include "hierconv/training.hpp"

#include <chrono>
#include <cmath>

#include "hierconv/errors.hpp"
#include "hierconv/eval.hpp"

namespace hierconv::training {

void TrainingConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (dropout < 0.0 || dropout >= 1.0)
    throw ConfigError("dropout must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (grad_clip < 0.0) throw ConfigError("grad_clip must be >= 0");
  if (eval_threshold < 0.0) throw ConfigError("eval_threshold must be >= 0");
  if (dropframe.max_len < 1) throw ConfigError("dropframe.max_len must be >= 1");
  if (delta_window < 1) throw ConfigError("delta_window must be >= 1");
  weights.validate();
}

Adam::Adam(TensorRefs params, double learning_rate, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(learning_rate), beta1_(beta1),
      beta2_(beta2), eps_(eps) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor* t : params_) {
    m_.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
    v_.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
  }
}

void Adam::step(double clip) {
  if (clip > 0.0) {
    double sq = 0.0;
    for (const Tensor* t : params_) sq += t->grad.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > clip) {
      const double scale = clip / norm;
      for (Tensor* t : params_) t->grad *= scale;
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor* t = params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * t->grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * t->grad.cwiseProduct(t->grad);
    const Mat m_hat = m_[i] / bc1;
    const Mat v_hat = v_[i] / bc2;
    t->value -=
        lr_ * (m_hat.array() / (v_hat.array().sqrt() + eps_)).matrix();
  }
}

PreparedCorpus prepare_features(const data::Corpus& corpus, int delta_window) {
  PreparedCorpus out;
  out.features.reserve(corpus.conversations.size());
  for (const auto& conv : corpus.conversations) {
    std::vector<Mat> feats;
    feats.reserve(conv.utterances.size());
    for (const auto& utt : conv.utterances) {
      features::FeatureSequence f = features::pipeline(utt.speech, delta_window);
      out.feature_dim = static_cast<int>(f.dim());
      feats.push_back(std::move(f.frames));
    }
    out.features.push_back(std::move(feats));
  }
  return out;
}

std::vector<std::vector<int>> pack_batches(const data::Corpus& corpus,
                                           const std::vector<int>& order,
                                           int batch_contexts) {
  std::vector<std::vector<int>> batches;
  std::vector<int> current;
  int contexts = 0;
  for (int ci : order) {
    current.push_back(ci);
    contexts += static_cast<int>(
        corpus.conversations[static_cast<std::size_t>(ci)].utterances.size());
    if (contexts >= batch_contexts) {
      batches.push_back(std::move(current));
      current.clear();
      contexts = 0;
    }
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

TensorRefs trainable_tensors(model::ModelParams& params, model::Regime regime,
                             bool freeze_speech, bool freeze_text) {
  TensorRefs out;
  if (model::regime_uses_speech(regime) && !freeze_speech)
    for (Tensor* t : params.speech_tensors()) out.push_back(t);
  if (model::regime_uses_text(regime) && !freeze_text)
    for (Tensor* t : params.text_tensors()) out.push_back(t);
  for (Tensor* t : params.conversation_tensors()) out.push_back(t);
  for (Tensor* t : params.classifier_tensors()) out.push_back(t);
  return out;
}

namespace {

// DropFrame applied to a cached pipeline output.
Mat drop_rows(const Mat& frames, const features::DropFrameConfig& cfg, Rng& rng) {
  features::FeatureSequence seq;
  seq.frames = frames;
  return features::drop_frames(seq, cfg, rng).frames;
}

struct LossAccumulator {
  double bce_s = 0.0, bce_t = 0.0, euc = 0.0, con = 0.0, total = 0.0;
  int batches = 0;

  void add(Graph& g, const model::ForwardOutputs& out) {
    auto val = [&](Graph::Id id) { return id >= 0 ? g.value(id)(0, 0) : 0.0; };
    bce_s += val(out.loss_bce_speech);
    bce_t += val(out.loss_bce_text);
    euc += val(out.loss_euclidean);
    con += val(out.loss_contrastive);
    total += val(out.loss_total);
    ++batches;
  }

  void fill(EpochRecord& rec) const {
    const double n = std::max(1, batches);
    rec.bce_speech = bce_s / n;
    rec.bce_text = bce_t / n;
    rec.euclidean = euc / n;
    rec.contrastive = con / n;
    rec.total = total / n;
  }
};

}  // namespace

TrainResult train(model::ModelParams& params, const data::Corpus& train_split,
                  const data::Corpus& dev_split, const TrainingConfig& config) {
  config.validate();
  if (train_split.conversations.empty() || dev_split.conversations.empty())
    throw DataError("train: empty split");
  if (model::regime_uses_text(config.regime) && !train_split.has_transcripts())
    throw ConfigError("regime " + model::regime_name(config.regime) +
                      " requires transcripts in the training corpus");

  const PreparedCorpus prepared =
      prepare_features(train_split, config.delta_window);
  if (prepared.feature_dim != params.cfg.feature_dim)
    throw ConfigError("train: corpus features give dim " +
                      std::to_string(prepared.feature_dim) +
                      " but the model expects " +
                      std::to_string(params.cfg.feature_dim));

  Adam optimizer(trainable_tensors(params, config.regime, config.freeze_speech,
                                   config.freeze_text),
                 config.learning_rate);
  const TensorRefs all = params.all_tensors();

  eval::EvalSettings dev_eval;
  dev_eval.regime = config.regime;
  dev_eval.n_max = config.n_max;
  dev_eval.threshold = config.eval_threshold;
  dev_eval.delta_window = config.delta_window;
  dev_eval.batch_contexts = config.batch_size;

  const Rng master(config.seed);
  EarlyStopper stopper(config.patience);
  TrainResult result;
  std::vector<Mat> best_values;

  std::vector<int> order(train_split.conversations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng = master.child("shuffle").child(static_cast<std::uint64_t>(epoch));
    Rng dropframe_rng = master.child("dropframe").child(static_cast<std::uint64_t>(epoch));
    Rng dropout_rng = master.child("dropout").child(static_cast<std::uint64_t>(epoch));

    shuffle_rng.shuffle(order);
    const auto batches = pack_batches(train_split, order, config.batch_size);

    LossAccumulator acc;
    for (const auto& batch : batches) {
      Graph g;
      std::vector<model::BatchConversation> items;
      items.reserve(batch.size());
      for (int ci : batch) {
        model::BatchConversation item;
        item.conv = &train_split.conversations[static_cast<std::size_t>(ci)];
        const auto& cached = prepared.features[static_cast<std::size_t>(ci)];
        item.features.reserve(cached.size());
        for (const Mat& f : cached)
          item.features.push_back(
              config.dropframe.enabled
                  ? drop_rows(f, config.dropframe, dropframe_rng)
                  : f);
        items.push_back(std::move(item));
      }

      model::ForwardOptions opts;
      opts.regime = config.regime;
      opts.weights = config.weights;
      opts.training = true;
      opts.n_max = config.n_max;
      opts.tie_all_utterances = config.tie_all_utterances;
      nn::DropoutPlan plan;
      plan.rate = config.dropout;
      plan.rng = &dropout_rng;
      opts.dropout = plan;

      model::ForwardOutputs out = model::build_forward(g, params, items, opts);
      zero_grads(all);
      g.backward(out.loss_total);
      optimizer.step(config.grad_clip);
      acc.add(g, out);
    }
    const auto t1 = std::chrono::steady_clock::now();

    EpochRecord rec;
    rec.epoch = epoch;
    acc.fill(rec);
    rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    if (config.log_train_f1)
      rec.train_macro_f1 = eval::evaluate(params, train_split, dev_eval).macro_f1;
    rec.dev_macro_f1 = eval::evaluate(params, dev_split, dev_eval).macro_f1;
    result.history.push_back(rec);

    const bool was_best = rec.dev_macro_f1 > stopper.best_metric();
    const bool stop = stopper.observe(epoch, rec.dev_macro_f1);
    if (was_best) {
      best_values.clear();
      for (const Tensor* t : all) best_values.push_back(t->value);
    }
    if (stop) break;
  }

  result.best_epoch = stopper.best_epoch();
  result.best_dev_f1 = stopper.best_metric();
  if (!best_values.empty()) {
    TensorRefs tensors = params.all_tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i)
      tensors[i]->value = best_values[i];
  }
  return result;
}

std::vector<DropFrameBenchRow> benchmark_dropframe(
    const model::ModelConfig& model_config, const TrainingConfig& base_config,
    const data::Corpus& train_split, const data::Corpus& dev_split,
    const std::vector<int>& l_values, int epochs) {
  std::vector<DropFrameBenchRow> rows;
  for (int l : l_values) {
    TrainingConfig cfg = base_config;
    cfg.max_epochs = epochs;
    cfg.patience = epochs;  // no early stop inside the benchmark
    cfg.log_train_f1 = false;
    cfg.dropframe.enabled = l > 0;
    cfg.dropframe.max_len = l > 0 ? l : 1;

    model::ModelParams params(model_config, cfg.seed);
    TrainResult res = train(params, train_split, dev_split, cfg);

    DropFrameBenchRow row;
    row.enabled = l > 0;
    row.max_len = l > 0 ? l : 0;
    row.label = l > 0 ? std::to_string(l) : "off";
    double min_t = 1e300, sum_t = 0.0;
    for (const auto& rec : res.history) {
      min_t = std::min(min_t, rec.wall_time_s);
      sum_t += rec.wall_time_s;
    }
    row.seconds_per_epoch = min_t;
    row.mean_seconds_per_epoch = sum_t / std::max<std::size_t>(1, res.history.size());
    row.dev_macro_f1 = res.history.back().dev_macro_f1;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hierconv::training
