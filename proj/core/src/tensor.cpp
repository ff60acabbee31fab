// hierconv/tensor.cpp

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

#include "hierconv/tensor.hpp"

#include <cstring>

namespace hierconv {

std::uint64_t value_checksum(const TensorRefs& tensors) {
  // FNV-1a over the raw bytes of every value matrix, in list order.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Tensor* t : tensors) {
    mix(t->name.data(), t->name.size());
    mix(t->value.data(), sizeof(double) * static_cast<std::size_t>(t->value.size()));
  }
  return h;
}

double grad_sq_norm(const TensorRefs& tensors) {
  double s = 0.0;
  for (const Tensor* t : tensors) s += t->grad.squaredNorm();
  return s;
}

void zero_grads(const TensorRefs& tensors) {
  for (Tensor* t : tensors) t->zero_grad();
}

}  // namespace hierconv
