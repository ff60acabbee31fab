// tests/unit/test_graph.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "hierconv/gradcheck.hpp"
#include "hierconv/graph.hpp"
#include "hierconv/rng.hpp"

using hierconv::fd_compare;
using hierconv::Graph;
using hierconv::Mat;
using hierconv::Rng;
using hierconv::Tensor;
using hierconv::TensorRefs;

namespace {

Mat random_mat(Rng& rng, int r, int c, double scale = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  return m;
}

Tensor random_tensor(Rng& rng, const std::string& name, int r, int c,
                     double scale = 1.0) {
  Tensor t(name, r, c);
  t.value = random_mat(rng, r, c, scale);
  return t;
}

// Checks d(builder)/d(tensor) against central differences for every tensor.
void check_builder(TensorRefs tensors,
                   const std::function<Graph::Id(Graph&)>& builder) {
  hierconv::zero_grads(tensors);
  {
    Graph g;
    Graph::Id loss = builder(g);
    g.backward(loss);
  }
  auto forward = [&]() {
    Graph g;
    Graph::Id loss = builder(g);
    return g.value(loss)(0, 0);
  };
  auto report = fd_compare(tensors, forward);
  for (const auto& e : report.entries) {
    INFO("tensor ", e.tensor, " rel_error ", e.rel_error);
    CHECK(e.pass);
  }
}

}  // namespace

TEST_CASE("finite differences validate every primitive op") {
  Rng rng(1234);
  Tensor a = random_tensor(rng, "a", 4, 3);
  Tensor b = random_tensor(rng, "b", 4, 3);
  Tensor w = random_tensor(rng, "w", 3, 5);
  Tensor rv = random_tensor(rng, "rv", 1, 3);
  Tensor cv = random_tensor(rng, "cv", 4, 1);
  const Mat probe = random_mat(rng, 4, 3);
  const Mat probe5 = random_mat(rng, 4, 5);

  auto scalarize = [](Graph& g, Graph::Id x, const Mat& p) {
    return g.sum_all(g.emul(x, g.constant(p)));
  };

  SUBCASE("matmul") {
    check_builder({&a, &w}, [&](Graph& g) {
      return scalarize(g, g.matmul(g.param(a), g.param(w)), probe5);
    });
  }
  SUBCASE("transpose") {
    const Mat pt = probe.transpose();
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.transpose(g.param(a)), pt);
    });
  }
  SUBCASE("add and sub") {
    check_builder({&a, &b}, [&](Graph& g) {
      return scalarize(g, g.sub(g.add(g.param(a), g.param(b)), g.param(b)), probe);
    });
  }
  SUBCASE("add_rowvec") {
    check_builder({&a, &rv}, [&](Graph& g) {
      return scalarize(g, g.add_rowvec(g.param(a), g.param(rv)), probe);
    });
  }
  SUBCASE("emul") {
    check_builder({&a, &b}, [&](Graph& g) {
      return scalarize(g, g.emul(g.param(a), g.param(b)), probe);
    });
  }
  SUBCASE("emul_colvec") {
    check_builder({&a, &cv}, [&](Graph& g) {
      return scalarize(g, g.emul_colvec(g.param(a), g.param(cv)), probe);
    });
  }
  SUBCASE("scale") {
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.scale(g.param(a), -2.5), probe);
    });
  }
  SUBCASE("sigmoid") {
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.sigmoid(g.param(a)), probe);
    });
  }
  SUBCASE("tanh") {
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.tanh(g.param(a)), probe);
    });
  }
  SUBCASE("relu") {
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.relu(g.param(a)), probe);
    });
  }
  SUBCASE("sqrt") {
    Tensor pos = random_tensor(rng, "pos", 4, 3);
    pos.value = pos.value.array().abs() + 0.5;
    check_builder({&pos}, [&](Graph& g) {
      return scalarize(g, g.sqrt(g.param(pos)), probe);
    });
  }
  SUBCASE("recip") {
    Tensor pos = random_tensor(rng, "pos", 4, 3);
    pos.value = pos.value.array().abs() + 0.5;
    check_builder({&pos}, [&](Graph& g) {
      return scalarize(g, g.recip(g.param(pos)), probe);
    });
  }
  SUBCASE("rows gather, including repeats") {
    const Mat p4 = random_mat(rng, 4, 3);
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.rows(g.param(a), {2, 0, 0, 3}), p4);
    });
  }
  SUBCASE("slice_cols and concat_cols") {
    check_builder({&a}, [&](Graph& g) {
      Graph::Id x = g.param(a);
      Graph::Id left = g.slice_cols(x, 0, 2);
      Graph::Id right = g.slice_cols(x, 2, 1);
      return scalarize(g, g.concat_cols({right, left}), probe);
    });
  }
  SUBCASE("concat_rows") {
    const Mat p8 = random_mat(rng, 8, 3);
    check_builder({&a, &b}, [&](Graph& g) {
      return scalarize(g, g.concat_rows({g.param(a), g.param(b)}), p8);
    });
  }
  SUBCASE("row_sums") {
    const Mat p1 = random_mat(rng, 4, 1);
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.row_sums(g.param(a)), p1);
    });
  }
  SUBCASE("softmax_rows") {
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.softmax_rows(g.param(a)), probe);
    });
  }
  SUBCASE("log_softmax_rows") {
    check_builder({&a}, [&](Graph& g) {
      return scalarize(g, g.log_softmax_rows(g.param(a)), probe);
    });
  }
  SUBCASE("layer_norm") {
    Tensor gamma = random_tensor(rng, "gamma", 1, 3);
    Tensor beta = random_tensor(rng, "beta", 1, 3);
    check_builder({&a, &gamma, &beta}, [&](Graph& g) {
      return scalarize(g, g.layer_norm(g.param(a), g.param(gamma), g.param(beta)), probe);
    });
  }
  SUBCASE("diag_as_col") {
    Tensor sq = random_tensor(rng, "sq", 4, 4);
    const Mat p1 = random_mat(rng, 4, 1);
    check_builder({&sq}, [&](Graph& g) {
      return scalarize(g, g.diag_as_col(g.param(sq)), p1);
    });
  }
  SUBCASE("bce_with_logits_mean") {
    Mat targets(4, 3);
    Rng tr(9);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) targets(i, j) = tr.uniform_int(2);
    check_builder({&a}, [&](Graph& g) {
      return g.bce_with_logits_mean(g.param(a), targets);
    });
  }
}

TEST_CASE("detach blocks gradient flow exactly") {
  Rng rng(77);
  Tensor a = random_tensor(rng, "a", 3, 3);
  hierconv::zero_grads({&a});
  Graph g;
  Graph::Id x = g.param(a);
  Graph::Id loss = g.sum_all(g.emul(g.detach(x), x));
  g.backward(loss);
  // Only the non-detached factor contributes: d/dx sum(c * x) = c = value(a).
  CHECK((a.grad - a.value).norm() == doctest::Approx(0.0).epsilon(1e-14));

  hierconv::zero_grads({&a});
  Graph g2;
  Graph::Id x2 = g2.param(a);
  Graph::Id loss2 = g2.sum_all(g2.detach(g2.emul(x2, x2)));
  g2.backward(loss2);
  CHECK(a.grad.norm() == 0.0);
}

TEST_CASE("constants do not allocate gradients") {
  Graph g;
  Graph::Id c = g.constant(Mat::Ones(2, 2));
  Graph::Id s = g.sum_all(c);
  g.backward(s);  // nothing requires grad, this is a no-op
  CHECK(g.grad(c).norm() == 0.0);
  CHECK(!g.requires_grad(s));
}

TEST_CASE("backward accumulates when a node is reused") {
  Rng rng(5);
  Tensor a = random_tensor(rng, "a", 2, 2);
  hierconv::zero_grads({&a});
  Graph g;
  Graph::Id x = g.param(a);
  Graph::Id loss = g.sum_all(g.add(x, x));
  g.backward(loss);
  CHECK((a.grad - 2.0 * Mat::Ones(2, 2)).norm() == doctest::Approx(0.0));
}

TEST_CASE("stable bce matches the naive formula on moderate logits") {
  Rng rng(8);
  Graph g;
  Mat z = random_mat(rng, 3, 4, 2.0);
  Mat y(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) y(i, j) = rng.uniform_int(2);
  Graph::Id loss = g.bce_with_logits_mean(g.constant(z), y);
  double naive = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double p = 1.0 / (1.0 + std::exp(-z(i, j)));
      naive += -(y(i, j) * std::log(p) + (1.0 - y(i, j)) * std::log(1.0 - p));
    }
  }
  naive /= 12.0;
  CHECK(g.value(loss)(0, 0) == doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("bce saturates without overflow at extreme logits") {
  Graph g;
  Mat z(1, 2);
  z << 500.0, -500.0;
  Mat y(1, 2);
  y << 1.0, 0.0;
  Graph::Id loss = g.bce_with_logits_mean(g.constant(z), y);
  CHECK(std::isfinite(g.value(loss)(0, 0)));
  CHECK(g.value(loss)(0, 0) < 1e-10);
}
