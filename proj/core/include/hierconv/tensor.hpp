// hierconv/tensor.hpp

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

#ifndef HIERCONV_TENSOR_HPP_
#define HIERCONV_TENSOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hierconv {

using Mat = Eigen::MatrixXd;

/// A named parameter matrix paired with its gradient accumulator.
/// Vectors are stored as 1 x n or n x 1 matrices.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;

  Tensor() = default;
  Tensor(std::string n, int rows, int cols)
      : name(std::move(n)),
        value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

using TensorRefs = std::vector<Tensor*>;

/// Byte-exact hash of the tensor values, in list order. Used by the
/// regime-isolation and weight-sharing checks.
std::uint64_t value_checksum(const TensorRefs& tensors);

/// Sum of squared gradient entries over the list.
double grad_sq_norm(const TensorRefs& tensors);

void zero_grads(const TensorRefs& tensors);

}  // namespace hierconv

#endif  // HIERCONV_TENSOR_HPP_
