// hierconv/gradcheck.cpp

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

#include "hierconv/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace hierconv {

GradCheckReport fd_compare(const TensorRefs& tensors,
                           const std::function<double()>& forward,
                           double step, double tol) {
  GradCheckReport report;
  for (Tensor* t : tensors) {
    GradCheckEntry e;
    e.tensor = t->name;
    Mat fd(t->value.rows(), t->value.cols());
    for (Eigen::Index i = 0; i < t->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < t->value.cols(); ++j) {
        const double saved = t->value(i, j);
        t->value(i, j) = saved + step;
        const double up = forward();
        t->value(i, j) = saved - step;
        const double down = forward();
        t->value(i, j) = saved;
        fd(i, j) = (up - down) / (2.0 * step);
      }
    }
    e.analytic_norm = t->grad.norm();
    e.numeric_norm = fd.norm();
    const double denom = std::max(e.analytic_norm + e.numeric_norm, 1e-12);
    e.rel_error = (t->grad - fd).norm() / denom;
    e.pass = e.rel_error < tol;
    report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
    report.all_pass = report.all_pass && e.pass;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace hierconv
