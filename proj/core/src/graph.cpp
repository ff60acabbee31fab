// hierconv/graph.cpp

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

#include "hierconv/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hierconv {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("graph: " + msg);
}

double softplus_stable(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

Graph::Id Graph::constant(Mat v) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(v);
  return push(std::move(n));
}

Graph::Id Graph::param(Tensor& t) {
  Node n;
  n.op = Op::kParam;
  n.value = t.value;
  n.tensor = &t;
  n.needs_grad = true;
  return push(std::move(n));
}

Graph::Id Graph::detach(Id a) {
  Node n;
  n.op = Op::kDetach;
  n.value = at(a).value;
  return push(std::move(n));
}

Graph::Id Graph::matmul(Id a, Id b) {
  require(at(a).value.cols() == at(b).value.rows(), "matmul shape mismatch");
  Node n;
  n.op = Op::kMatmul;
  n.a = a;
  n.b = b;
  n.value = at(a).value * at(b).value;
  n.needs_grad = any_needs_grad(a) || any_needs_grad(b);
  return push(std::move(n));
}

Graph::Id Graph::transpose(Id a) {
  Node n;
  n.op = Op::kTranspose;
  n.a = a;
  n.value = at(a).value.transpose();
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::add(Id a, Id b) {
  require(at(a).value.rows() == at(b).value.rows() &&
              at(a).value.cols() == at(b).value.cols(),
          "add shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.value = at(a).value + at(b).value;
  n.needs_grad = any_needs_grad(a) || any_needs_grad(b);
  return push(std::move(n));
}

Graph::Id Graph::sub(Id a, Id b) {
  require(at(a).value.rows() == at(b).value.rows() &&
              at(a).value.cols() == at(b).value.cols(),
          "sub shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.value = at(a).value - at(b).value;
  n.needs_grad = any_needs_grad(a) || any_needs_grad(b);
  return push(std::move(n));
}

Graph::Id Graph::add_rowvec(Id a, Id r) {
  require(at(r).value.rows() == 1 && at(r).value.cols() == at(a).value.cols(),
          "add_rowvec shape mismatch");
  Node n;
  n.op = Op::kAddRowvec;
  n.a = a;
  n.b = r;
  n.value = at(a).value.rowwise() + at(r).value.row(0);
  n.needs_grad = any_needs_grad(a) || any_needs_grad(r);
  return push(std::move(n));
}

Graph::Id Graph::emul(Id a, Id b) {
  require(at(a).value.rows() == at(b).value.rows() &&
              at(a).value.cols() == at(b).value.cols(),
          "emul shape mismatch");
  Node n;
  n.op = Op::kEmul;
  n.a = a;
  n.b = b;
  n.value = at(a).value.cwiseProduct(at(b).value);
  n.needs_grad = any_needs_grad(a) || any_needs_grad(b);
  return push(std::move(n));
}

Graph::Id Graph::emul_colvec(Id a, Id c) {
  require(at(c).value.cols() == 1 && at(c).value.rows() == at(a).value.rows(),
          "emul_colvec shape mismatch");
  Node n;
  n.op = Op::kEmulColvec;
  n.a = a;
  n.b = c;
  n.value = (at(a).value.array().colwise() * at(c).value.col(0).array()).matrix();
  n.needs_grad = any_needs_grad(a) || any_needs_grad(c);
  return push(std::move(n));
}

Graph::Id Graph::scale(Id a, double s) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.s = s;
  n.value = at(a).value * s;
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::sigmoid(Id a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a;
  n.value = at(a).value.unaryExpr(
      [](double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                     : std::exp(z) / (1.0 + std::exp(z)); });
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::tanh(Id a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.value = at(a).value.array().tanh();
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::relu(Id a) {
  Node n;
  n.op = Op::kRelu;
  n.a = a;
  n.value = at(a).value.cwiseMax(0.0);
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::sqrt(Id a) {
  Node n;
  n.op = Op::kSqrt;
  n.a = a;
  n.value = at(a).value.array().sqrt();
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::recip(Id a) {
  Node n;
  n.op = Op::kRecip;
  n.a = a;
  n.value = at(a).value.cwiseInverse();
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::rows(Id a, std::vector<int> idx) {
  Node n;
  n.op = Op::kRows;
  n.a = a;
  n.idx = std::move(idx);
  const Mat& src = at(a).value;
  n.value.resize(static_cast<Eigen::Index>(n.idx.size()), src.cols());
  for (std::size_t i = 0; i < n.idx.size(); ++i) {
    require(n.idx[i] >= 0 && n.idx[i] < src.rows(), "rows index out of range");
    n.value.row(static_cast<Eigen::Index>(i)) = src.row(n.idx[i]);
  }
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::slice_cols(Id a, int c0, int ncols) {
  require(c0 >= 0 && ncols >= 1 && c0 + ncols <= at(a).value.cols(),
          "slice_cols out of range");
  Node n;
  n.op = Op::kSliceCols;
  n.a = a;
  n.i0 = c0;
  n.n0 = ncols;
  n.value = at(a).value.middleCols(c0, ncols);
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::concat_rows(const std::vector<Id>& parts) {
  require(!parts.empty(), "concat_rows needs at least one part");
  Node n;
  n.op = Op::kConcatRows;
  n.inputs = parts;
  Eigen::Index total = 0;
  const Eigen::Index cols = at(parts[0]).value.cols();
  for (Id p : parts) {
    require(at(p).value.cols() == cols, "concat_rows column mismatch");
    total += at(p).value.rows();
  }
  n.value.resize(total, cols);
  Eigen::Index r = 0;
  for (Id p : parts) {
    n.value.middleRows(r, at(p).value.rows()) = at(p).value;
    r += at(p).value.rows();
    n.needs_grad = n.needs_grad || any_needs_grad(p);
  }
  return push(std::move(n));
}

Graph::Id Graph::concat_cols(const std::vector<Id>& parts) {
  require(!parts.empty(), "concat_cols needs at least one part");
  Node n;
  n.op = Op::kConcatCols;
  n.inputs = parts;
  Eigen::Index total = 0;
  const Eigen::Index rows_n = at(parts[0]).value.rows();
  for (Id p : parts) {
    require(at(p).value.rows() == rows_n, "concat_cols row mismatch");
    total += at(p).value.cols();
  }
  n.value.resize(rows_n, total);
  Eigen::Index c = 0;
  for (Id p : parts) {
    n.value.middleCols(c, at(p).value.cols()) = at(p).value;
    c += at(p).value.cols();
    n.needs_grad = n.needs_grad || any_needs_grad(p);
  }
  return push(std::move(n));
}

Graph::Id Graph::row_sums(Id a) {
  Node n;
  n.op = Op::kRowSums;
  n.a = a;
  n.value = at(a).value.rowwise().sum();
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::sum_all(Id a) {
  Node n;
  n.op = Op::kSumAll;
  n.a = a;
  n.value = Mat::Constant(1, 1, at(a).value.sum());
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::softmax_rows(Id a) {
  Node n;
  n.op = Op::kSoftmaxRows;
  n.a = a;
  const Mat& x = at(a).value;
  n.value.resizeLike(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    Eigen::RowVectorXd e = (x.row(i).array() - m).exp().matrix();
    n.value.row(i) = e / e.sum();
  }
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::log_softmax_rows(Id a) {
  Node n;
  n.op = Op::kLogSoftmaxRows;
  n.a = a;
  const Mat& x = at(a).value;
  n.value.resizeLike(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    const double lse = m + std::log((x.row(i).array() - m).exp().sum());
    n.value.row(i) = (x.row(i).array() - lse).matrix();
  }
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::layer_norm(Id x, Id gamma, Id beta, double eps) {
  const Mat& v = at(x).value;
  require(at(gamma).value.rows() == 1 && at(gamma).value.cols() == v.cols() &&
              at(beta).value.rows() == 1 && at(beta).value.cols() == v.cols(),
          "layer_norm parameter shape mismatch");
  Node n;
  n.op = Op::kLayerNorm;
  n.a = x;
  n.b = gamma;
  n.c = beta;
  const Eigen::Index m = v.cols();
  n.aux.resizeLike(v);                 // normalized x-hat
  n.aux2.resize(v.rows(), 1);          // per-row inverse std
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double mu = v.row(i).mean();
    const double var = (v.row(i).array() - mu).square().sum() / static_cast<double>(m);
    const double inv_s = 1.0 / std::sqrt(var + eps);
    n.aux.row(i) = ((v.row(i).array() - mu) * inv_s).matrix();
    n.aux2(i, 0) = inv_s;
  }
  n.value = n.aux;
  n.value.array().rowwise() *= at(gamma).value.row(0).array();
  n.value.array().rowwise() += at(beta).value.row(0).array();
  n.needs_grad = any_needs_grad(x) || any_needs_grad(gamma) || any_needs_grad(beta);
  return push(std::move(n));
}

Graph::Id Graph::diag_as_col(Id a) {
  require(at(a).value.rows() == at(a).value.cols(), "diag_as_col needs square input");
  Node n;
  n.op = Op::kDiagAsCol;
  n.a = a;
  n.value = at(a).value.diagonal();
  n.needs_grad = any_needs_grad(a);
  return push(std::move(n));
}

Graph::Id Graph::bce_with_logits_mean(Id logits, Mat targets) {
  const Mat& z = at(logits).value;
  require(z.rows() == targets.rows() && z.cols() == targets.cols(),
          "bce shape mismatch");
  Node n;
  n.op = Op::kBceWithLogitsMean;
  n.a = logits;
  n.aux = std::move(targets);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      total += softplus_stable(z(i, j)) - z(i, j) * n.aux(i, j);
  n.value = Mat::Constant(1, 1, total / static_cast<double>(z.size()));
  n.needs_grad = any_needs_grad(logits);
  return push(std::move(n));
}

Mat Graph::grad(Id id) const {
  const Node& n = at(id);
  if (n.grad.size() == 0) return Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::add_grad(Id id, const Mat& g) {
  Node& n = at(id);
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Graph::backward(Id root) {
  require(at(root).value.rows() == 1 && at(root).value.cols() == 1,
          "backward root must be scalar");
  if (!at(root).needs_grad) return;
  at(root).grad = Mat::Constant(1, 1, 1.0);
  for (Id id = root; id >= 0; --id) {
    Node& n = at(id);
    if (!n.needs_grad || n.grad.size() == 0) continue;
    backward_node(id);
  }
}

void Graph::backward_node(Id id) {
  Node& n = at(id);
  const Mat& g = n.grad;
  switch (n.op) {
    case Op::kConstant:
    case Op::kDetach:
      break;
    case Op::kParam:
      n.tensor->grad += g;
      break;
    case Op::kMatmul:
      if (any_needs_grad(n.a)) add_grad(n.a, g * at(n.b).value.transpose());
      if (any_needs_grad(n.b)) add_grad(n.b, at(n.a).value.transpose() * g);
      break;
    case Op::kTranspose:
      add_grad(n.a, g.transpose());
      break;
    case Op::kAdd:
      if (any_needs_grad(n.a)) add_grad(n.a, g);
      if (any_needs_grad(n.b)) add_grad(n.b, g);
      break;
    case Op::kSub:
      if (any_needs_grad(n.a)) add_grad(n.a, g);
      if (any_needs_grad(n.b)) add_grad(n.b, -g);
      break;
    case Op::kAddRowvec:
      if (any_needs_grad(n.a)) add_grad(n.a, g);
      if (any_needs_grad(n.b)) add_grad(n.b, g.colwise().sum());
      break;
    case Op::kEmul:
      if (any_needs_grad(n.a)) add_grad(n.a, g.cwiseProduct(at(n.b).value));
      if (any_needs_grad(n.b)) add_grad(n.b, g.cwiseProduct(at(n.a).value));
      break;
    case Op::kEmulColvec:
      if (any_needs_grad(n.a))
        add_grad(n.a, (g.array().colwise() * at(n.b).value.col(0).array()).matrix());
      if (any_needs_grad(n.b))
        add_grad(n.b, g.cwiseProduct(at(n.a).value).rowwise().sum());
      break;
    case Op::kScale:
      add_grad(n.a, g * n.s);
      break;
    case Op::kSigmoid:
      add_grad(n.a, (g.array() * n.value.array() * (1.0 - n.value.array())).matrix());
      break;
    case Op::kTanh:
      add_grad(n.a, (g.array() * (1.0 - n.value.array().square())).matrix());
      break;
    case Op::kRelu:
      add_grad(n.a, (g.array() * (at(n.a).value.array() > 0.0).cast<double>()).matrix());
      break;
    case Op::kSqrt:
      add_grad(n.a, (g.array() * (0.5 / n.value.array().max(1e-12))).matrix());
      break;
    case Op::kRecip:
      add_grad(n.a, (-g.array() * n.value.array().square()).matrix());
      break;
    case Op::kRows: {
      if (!any_needs_grad(n.a)) break;
      Mat acc = Mat::Zero(at(n.a).value.rows(), at(n.a).value.cols());
      for (std::size_t i = 0; i < n.idx.size(); ++i)
        acc.row(n.idx[i]) += g.row(static_cast<Eigen::Index>(i));
      add_grad(n.a, acc);
      break;
    }
    case Op::kSliceCols: {
      if (!any_needs_grad(n.a)) break;
      Mat acc = Mat::Zero(at(n.a).value.rows(), at(n.a).value.cols());
      acc.middleCols(n.i0, n.n0) = g;
      add_grad(n.a, acc);
      break;
    }
    case Op::kConcatRows: {
      Eigen::Index r = 0;
      for (Id p : n.inputs) {
        const Eigen::Index pr = at(p).value.rows();
        if (any_needs_grad(p)) add_grad(p, g.middleRows(r, pr));
        r += pr;
      }
      break;
    }
    case Op::kConcatCols: {
      Eigen::Index c = 0;
      for (Id p : n.inputs) {
        const Eigen::Index pc = at(p).value.cols();
        if (any_needs_grad(p)) add_grad(p, g.middleCols(c, pc));
        c += pc;
      }
      break;
    }
    case Op::kRowSums:
      add_grad(n.a, g.col(0).replicate(1, at(n.a).value.cols()));
      break;
    case Op::kSumAll:
      add_grad(n.a, Mat::Constant(at(n.a).value.rows(), at(n.a).value.cols(), g(0, 0)));
      break;
    case Op::kSoftmaxRows: {
      // dx = y * (g - rowsum(g * y))
      Eigen::VectorXd rs = g.cwiseProduct(n.value).rowwise().sum();
      Mat adj = g;
      adj.array().colwise() -= rs.array();
      add_grad(n.a, n.value.cwiseProduct(adj));
      break;
    }
    case Op::kLogSoftmaxRows: {
      // dx = g - softmax(x) * rowsum(g)
      Eigen::VectorXd rs = g.rowwise().sum();
      Mat sm = n.value.array().exp().matrix();
      add_grad(n.a, g - (sm.array().colwise() * rs.array()).matrix());
      break;
    }
    case Op::kLayerNorm: {
      const Mat& xhat = n.aux;
      const Mat gx_hat_scale = at(n.b).value;  // gamma 1 x m
      const Eigen::Index m = xhat.cols();
      if (any_needs_grad(n.c)) add_grad(n.c, g.colwise().sum());
      if (any_needs_grad(n.b)) add_grad(n.b, g.cwiseProduct(xhat).colwise().sum());
      if (any_needs_grad(n.a)) {
        Mat dxhat = g;
        dxhat.array().rowwise() *= gx_hat_scale.row(0).array();
        Eigen::VectorXd mean_dxhat = dxhat.rowwise().mean();
        Eigen::VectorXd mean_dxhat_xhat =
            dxhat.cwiseProduct(xhat).rowwise().sum() / static_cast<double>(m);
        Mat dx = dxhat;
        dx.array().colwise() -= mean_dxhat.array();
        dx -= (xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
        dx.array().colwise() *= n.aux2.col(0).array();
        add_grad(n.a, dx);
      }
      break;
    }
    case Op::kDiagAsCol: {
      if (!any_needs_grad(n.a)) break;
      Mat acc = Mat::Zero(at(n.a).value.rows(), at(n.a).value.cols());
      acc.diagonal() = g.col(0);
      add_grad(n.a, acc);
      break;
    }
    case Op::kBceWithLogitsMean: {
      if (!any_needs_grad(n.a)) break;
      const Mat& z = at(n.a).value;
      const double scale_g = g(0, 0) / static_cast<double>(z.size());
      Mat sig = z.unaryExpr([](double v) {
        return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
      });
      add_grad(n.a, (sig - n.aux) * scale_g);
      break;
    }
  }
  // The grad buffer of interior nodes is no longer needed; keep it for
  // inspection in tests (memory is reclaimed on clear()).
}

Graph::Id affine(Graph& g, Graph::Id x, Graph::Id w, Graph::Id b) {
  Graph::Id y = g.matmul(x, w);
  if (b >= 0) y = g.add_rowvec(y, b);
  return y;
}

}  // namespace hierconv
