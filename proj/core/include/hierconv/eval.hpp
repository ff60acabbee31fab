// hierconv/eval.hpp

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

#ifndef HIERCONV_EVAL_HPP_
#define HIERCONV_EVAL_HPP_

#include <string>
#include <vector>

#include "hierconv/model.hpp"

namespace hierconv::eval {

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;    // positives in the targets
  long predicted = 0;  // positives in the predictions
};

struct EvalReport {
  double macro_f1 = 0.0;
  std::vector<ClassScore> per_class;
  double threshold = 0.5;
  /// Classes with zero support. They score 0 and drag macro-F1 down; listed
  /// so small-test-set runs are auditable.
  std::vector<int> zero_support_classes;

  std::string to_table() const;
  std::string to_json() const;
};

/// Per-class F1 = 2PR/(P+R) with the 0/0 := 0 convention; macro-F1 is the
/// unweighted mean over all classes including zero-support ones.
EvalReport macro_f1(const Mat& predictions, const Mat& targets,
                    double threshold = 0.5);

/// Full forward evaluation of one corpus split: dropout and DropFrame off,
/// sigmoid(logit) >= threshold counts as a positive prediction. The branch
/// is the regime's test-time model (speech unless HIER-T).
struct EvalSettings {
  model::Regime regime = model::Regime::kHierST;
  int n_max = 10;
  double threshold = 0.5;
  int delta_window = 2;
  int batch_contexts = 16;
};

EvalReport evaluate(model::ModelParams& params, const data::Corpus& corpus,
                    const EvalSettings& settings);

}  // namespace hierconv::eval

#endif  // HIERCONV_EVAL_HPP_
