// hierconv/eval.cpp

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

#include "hierconv/eval.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "hierconv/errors.hpp"
#include "hierconv/training.hpp"

namespace hierconv::eval {

EvalReport macro_f1(const Mat& predictions, const Mat& targets, double threshold) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
    throw DataError("macro_f1: shape mismatch");
  const auto L = predictions.cols();
  EvalReport report;
  report.threshold = threshold;
  report.per_class.resize(static_cast<std::size_t>(L));
  double sum_f1 = 0.0;
  for (Eigen::Index c = 0; c < L; ++c) {
    long tp = 0, fp = 0, fn = 0, support = 0, predicted = 0;
    for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
      const bool p = predictions(i, c) != 0.0;
      const bool t = targets(i, c) != 0.0;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
      support += t;
      predicted += p;
    }
    ClassScore& s = report.per_class[static_cast<std::size_t>(c)];
    s.support = support;
    s.predicted = predicted;
    s.precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    if (support == 0) {
      // Conservative convention: zero-support classes score 0 and are
      // flagged rather than being excluded or scored 1.
      s.f1 = 0.0;
      report.zero_support_classes.push_back(static_cast<int>(c));
    }
    sum_f1 += s.f1;
  }
  report.macro_f1 = L > 0 ? sum_f1 / static_cast<double>(L) : 0.0;
  return report;
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << "class  precision  recall     f1         support  predicted\n";
  char line[128];
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const auto& s = per_class[c];
    std::snprintf(line, sizeof(line), "%-6zu %-10.4f %-10.4f %-10.4f %-8ld %-8ld%s\n",
                  c, s.precision, s.recall, s.f1, s.support, s.predicted,
                  s.support == 0 ? "  [zero support]" : "");
    os << line;
  }
  std::snprintf(line, sizeof(line), "macro-F1 %.6f  (threshold %.3f)\n", macro_f1,
                threshold);
  os << line;
  return os.str();
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["macro_f1"] = macro_f1;
  j["threshold"] = threshold;
  j["zero_support_classes"] = zero_support_classes;
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& s : per_class) {
    classes.push_back({{"precision", s.precision},
                       {"recall", s.recall},
                       {"f1", s.f1},
                       {"support", s.support},
                       {"predicted", s.predicted}});
  }
  j["per_class"] = std::move(classes);
  return j.dump(2);
}

EvalReport evaluate(model::ModelParams& params, const data::Corpus& corpus,
                    const EvalSettings& settings) {
  if (corpus.conversations.empty()) throw DataError("evaluate: empty split");
  const auto prepared =
      training::prepare_features(corpus, settings.delta_window);
  if (prepared.feature_dim != params.cfg.feature_dim)
    throw ConfigError("evaluate: corpus features give dim " +
                      std::to_string(prepared.feature_dim) +
                      " but the model expects " +
                      std::to_string(params.cfg.feature_dim));

  std::vector<int> order(corpus.conversations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const auto batches =
      training::pack_batches(corpus, order, settings.batch_contexts);

  const bool speech_branch = settings.regime != model::Regime::kHierT;
  std::vector<Mat> pred_blocks, target_blocks;
  for (const auto& batch : batches) {
    Graph g;
    std::vector<model::BatchConversation> items;
    for (int ci : batch) {
      model::BatchConversation item;
      item.conv = &corpus.conversations[static_cast<std::size_t>(ci)];
      item.features = prepared.features[static_cast<std::size_t>(ci)];
      items.push_back(std::move(item));
    }
    model::ForwardOptions opts;
    // The test-time model: the speech branch unless this is HIER-T (the text
    // branch is the teacher and is discarded otherwise).
    opts.regime = speech_branch ? model::Regime::kHierS : model::Regime::kHierT;
    opts.training = false;
    opts.n_max = settings.n_max;
    model::ForwardOutputs out = model::build_forward(g, params, items, opts);
    const Mat& logits =
        g.value(speech_branch ? out.speech_logits : out.text_logits);
    Mat preds(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i)
      for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const double prob = 1.0 / (1.0 + std::exp(-logits(i, j)));
        preds(i, j) = prob >= settings.threshold ? 1.0 : 0.0;
      }
    pred_blocks.push_back(std::move(preds));
    target_blocks.push_back(out.targets);
  }

  Eigen::Index total = 0;
  for (const auto& b : pred_blocks) total += b.rows();
  Mat preds(total, params.cfg.num_labels), targets(total, params.cfg.num_labels);
  Eigen::Index row = 0;
  for (std::size_t b = 0; b < pred_blocks.size(); ++b) {
    preds.middleRows(row, pred_blocks[b].rows()) = pred_blocks[b];
    targets.middleRows(row, target_blocks[b].rows()) = target_blocks[b];
    row += pred_blocks[b].rows();
  }
  return macro_f1(preds, targets, settings.threshold);
}

}  // namespace hierconv::eval
