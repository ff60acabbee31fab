// hierconv/graph.hpp

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

#ifndef HIERCONV_GRAPH_HPP_
#define HIERCONV_GRAPH_HPP_

#include <vector>

#include "hierconv/tensor.hpp"

namespace hierconv {

/// Reverse-mode tape over dense double matrices.
///
/// Values are computed eagerly as ops are recorded, so a forward pass is just
/// graph construction. backward(root) then walks the tape in reverse and
/// accumulates gradients into every bound Tensor. Nodes that cannot reach a
/// parameter (constants, detached values) are pruned from the backward walk.
///
/// One Graph instance is built per batch and cleared afterwards. Instances
/// are not thread-safe; concurrent batches need one Graph each.
class Graph {
 public:
  using Id = int;

  // Leaves.
  Id constant(Mat v);
  Id param(Tensor& t);
  /// Value copy of `a` that blocks gradient flow.
  Id detach(Id a);

  // Linear algebra.
  Id matmul(Id a, Id b);
  Id transpose(Id a);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  /// a + r broadcast over rows; r is 1 x cols(a).
  Id add_rowvec(Id a, Id r);
  Id emul(Id a, Id b);
  /// a * c broadcast over columns; c is rows(a) x 1.
  Id emul_colvec(Id a, Id c);
  Id scale(Id a, double s);

  // Elementwise nonlinearities.
  Id sigmoid(Id a);
  Id tanh(Id a);
  Id relu(Id a);
  /// Elementwise sqrt; the derivative is clamped near zero.
  Id sqrt(Id a);
  /// Elementwise reciprocal.
  Id recip(Id a);

  // Shape ops.
  Id rows(Id a, std::vector<int> idx);
  Id slice_cols(Id a, int c0, int n);
  Id concat_rows(const std::vector<Id>& parts);
  Id concat_cols(const std::vector<Id>& parts);

  // Reductions and row ops.
  Id row_sums(Id a);  // n x m -> n x 1
  Id sum_all(Id a);   // -> 1 x 1
  Id softmax_rows(Id a);
  Id log_softmax_rows(Id a);
  /// Rowwise layer norm; gamma and beta are 1 x cols(x).
  Id layer_norm(Id x, Id gamma, Id beta, double eps = 1e-5);
  Id diag_as_col(Id a);  // square n x n -> n x 1

  /// Mean over all entries of the stable binary cross entropy with logits,
  /// softplus(z) - z * y. Targets are a constant matrix of the same shape.
  Id bce_with_logits_mean(Id logits, Mat targets);

  const Mat& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  /// Gradient of a node after backward(); zero matrix if it was not reached.
  Mat grad(Id id) const;
  bool requires_grad(Id id) const {
    return nodes_[static_cast<std::size_t>(id)].needs_grad;
  }

  /// Accumulate d(root)/d(tensor) into every reachable Tensor's grad.
  /// root must be 1 x 1.
  void backward(Id root);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kConstant,
    kParam,
    kDetach,
    kMatmul,
    kTranspose,
    kAdd,
    kSub,
    kAddRowvec,
    kEmul,
    kEmulColvec,
    kScale,
    kSigmoid,
    kTanh,
    kRelu,
    kSqrt,
    kRecip,
    kRows,
    kSliceCols,
    kConcatRows,
    kConcatCols,
    kRowSums,
    kSumAll,
    kSoftmaxRows,
    kLogSoftmaxRows,
    kLayerNorm,
    kDiagAsCol,
    kBceWithLogitsMean,
  };

  struct Node {
    Op op;
    Mat value;
    Mat grad;  // sized lazily during backward
    bool needs_grad = false;
    int a = -1, b = -1, c = -1;
    std::vector<Id> inputs;  // concat only
    std::vector<int> idx;    // rows only
    double s = 0.0;
    int i0 = 0, n0 = 0;
    Mat aux, aux2;  // op-specific saved state
    Tensor* tensor = nullptr;
  };

  Id push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size()) - 1;
  }
  Node& at(Id id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& at(Id id) const { return nodes_[static_cast<std::size_t>(id)]; }
  bool any_needs_grad(Id x) const { return x >= 0 && at(x).needs_grad; }
  void add_grad(Id id, const Mat& g);
  void backward_node(Id id);

  std::vector<Node> nodes_;
};

/// x * W + b with b broadcast over rows. b may be -1 to skip the bias.
Graph::Id affine(Graph& g, Graph::Id x, Graph::Id w, Graph::Id b);

}  // namespace hierconv

#endif  // HIERCONV_GRAPH_HPP_
