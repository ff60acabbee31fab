// hierconv/gradcheck.hpp

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

#ifndef HIERCONV_GRADCHECK_HPP_
#define HIERCONV_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "hierconv/conversation.hpp"
#include "hierconv/tensor.hpp"

namespace hierconv {

struct GradCheckEntry {
  std::string tensor;
  double rel_error = 0.0;
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  bool all_pass = true;
  double max_rel_error = 0.0;
};

/// Compares the analytic gradients already accumulated in `tensors` against
/// central finite differences of `forward`, which must recompute the loss
/// from the tensors' current values on every call. Every entry of every
/// tensor is perturbed. The relative error per tensor is
/// ||g_a - g_fd||_2 / max(||g_a||_2 + ||g_fd||_2, floor).
GradCheckReport fd_compare(const TensorRefs& tensors,
                           const std::function<double()>& forward,
                           double step = 1e-5, double tol = 1e-4);

// ---------------------------------------------------------------------------
// Whole-model verification at toy dimensions (d_model=8, 3 contexts, at most
// 6 post-pipeline frames per utterance). Runs:
//   * each loss against finite differences on its inputs,
//   * the composed pipeline (features -> encoders -> conversation encoder ->
//     classifier -> loss) under the pure-BCE objective for every tensor,
//   * the composed pipeline with cross-modal losses for every tensor outside
//     the text bucket (the stop-gradient makes text analytically constant
//     there, which is asserted exactly instead).
// ---------------------------------------------------------------------------

struct ModelCheckEntry {
  std::string check;   // which sub-check the row belongs to
  std::string tensor;
  double rel_error = 0.0;
  bool pass = false;
};

struct ModelCheckReport {
  std::vector<ModelCheckEntry> entries;
  bool stop_gradient_exact = false;  // theta_t grads exactly zero
  bool speech_grad_nonzero = false;  // some theta_s entry nonzero
  bool all_pass = false;
  double runtime_s = 0.0;
};

ModelCheckReport check_model_gradients(std::uint64_t seed,
                                       conversation::Variant variant,
                                       double step = 1e-5, double tol = 1e-4);

}  // namespace hierconv

#endif  // HIERCONV_GRADCHECK_HPP_
