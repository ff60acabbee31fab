// hierconv/nn_blocks.cpp

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

#include "hierconv/nn_blocks.hpp"

#include <cmath>

#include "hierconv/errors.hpp"

namespace hierconv::nn {

Graph::Id apply_dropout(Graph& g, Graph::Id x, const DropoutPlan& plan) {
  if (!plan.active()) return x;
  const Mat& v = g.value(x);
  Mat mask(v.rows(), v.cols());
  const double keep_scale = 1.0 / (1.0 - plan.rate);
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      mask(i, j) = plan.rng->u01() >= plan.rate ? keep_scale : 0.0;
  return g.emul(x, g.constant(std::move(mask)));
}

LstmDirParams::LstmDirParams(const std::string& prefix, int in_dim, int hidden)
    : w_ih(prefix + ".w_ih", in_dim, 4 * hidden),
      w_hh(prefix + ".w_hh", hidden, 4 * hidden),
      bias(prefix + ".bias", 1, 4 * hidden) {}

void LstmDirParams::collect(TensorRefs& out) {
  out.push_back(&w_ih);
  out.push_back(&w_hh);
  out.push_back(&bias);
}

LstmDirOutput lstm_direction(Graph& g, LstmDirParams& p,
                             const std::vector<Graph::Id>& inputs,
                             const std::vector<Graph::Id>& step_masks,
                             bool reverse) {
  if (inputs.empty()) throw DataError("lstm_direction: empty sequence");
  const int T = static_cast<int>(inputs.size());
  const int h = p.hidden();
  const auto B = g.value(inputs[0]).rows();

  const Graph::Id w_ih = g.param(p.w_ih);
  const Graph::Id w_hh = g.param(p.w_hh);
  const Graph::Id bias = g.param(p.bias);

  Graph::Id h_prev = g.constant(Mat::Zero(B, h));
  Graph::Id c_prev = g.constant(Mat::Zero(B, h));

  LstmDirOutput out;
  out.step_h.assign(static_cast<std::size_t>(T), -1);

  for (int step = 0; step < T; ++step) {
    const int t = reverse ? T - 1 - step : step;
    const auto ti = static_cast<std::size_t>(t);
    Graph::Id pre = g.add(affine(g, inputs[ti], w_ih, bias),
                          g.matmul(h_prev, w_hh));
    Graph::Id gi = g.sigmoid(g.slice_cols(pre, 0, h));
    Graph::Id gf = g.sigmoid(g.slice_cols(pre, h, h));
    Graph::Id gc = g.tanh(g.slice_cols(pre, 2 * h, h));
    Graph::Id go = g.sigmoid(g.slice_cols(pre, 3 * h, h));
    Graph::Id c_new = g.add(g.emul(gf, c_prev), g.emul(gi, gc));
    Graph::Id h_new = g.emul(go, g.tanh(c_new));

    // Rows past their own length keep the previous state.
    const Mat& m = g.value(step_masks[ti]);
    Graph::Id inv_mask = g.constant((1.0 - m.array()).matrix());
    Graph::Id c_t = g.add(g.emul_colvec(c_new, step_masks[ti]),
                          g.emul_colvec(c_prev, inv_mask));
    Graph::Id h_t = g.add(g.emul_colvec(h_new, step_masks[ti]),
                          g.emul_colvec(h_prev, inv_mask));
    out.step_h[ti] = h_t;
    h_prev = h_t;
    c_prev = c_t;
  }
  out.final_h = h_prev;
  return out;
}

BiLstmOutput bilstm_layer(Graph& g, BiLstmLayerParams& p,
                          const std::vector<Graph::Id>& inputs,
                          const std::vector<Graph::Id>& step_masks) {
  LstmDirOutput f = lstm_direction(g, p.fwd, inputs, step_masks, false);
  LstmDirOutput b = lstm_direction(g, p.bwd, inputs, step_masks, true);
  BiLstmOutput out;
  out.step_h.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t)
    out.step_h.push_back(g.concat_cols({f.step_h[t], b.step_h[t]}));
  out.final_fwd = f.final_h;
  out.final_bwd = b.final_h;
  return out;
}

TransformerLayerParams::TransformerLayerParams(const std::string& prefix,
                                               int d_model)
    : wq(prefix + ".wq", d_model, d_model),
      bq(prefix + ".bq", 1, d_model),
      wk(prefix + ".wk", d_model, d_model),
      bk(prefix + ".bk", 1, d_model),
      wv(prefix + ".wv", d_model, d_model),
      bv(prefix + ".bv", 1, d_model),
      wo(prefix + ".wo", d_model, d_model),
      bo(prefix + ".bo", 1, d_model),
      ff_w1(prefix + ".ff_w1", d_model, 4 * d_model),
      ff_b1(prefix + ".ff_b1", 1, 4 * d_model),
      ff_w2(prefix + ".ff_w2", 4 * d_model, d_model),
      ff_b2(prefix + ".ff_b2", 1, d_model),
      ln1_g(prefix + ".ln1_g", 1, d_model),
      ln1_b(prefix + ".ln1_b", 1, d_model),
      ln2_g(prefix + ".ln2_g", 1, d_model),
      ln2_b(prefix + ".ln2_b", 1, d_model) {}

void TransformerLayerParams::collect(TensorRefs& out) {
  for (Tensor* t : {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo, &ff_w1, &ff_b1,
                    &ff_w2, &ff_b2, &ln1_g, &ln1_b, &ln2_g, &ln2_b})
    out.push_back(t);
}

Graph::Id transformer_layer(Graph& g, TransformerLayerParams& p, Graph::Id x,
                            int heads, const DropoutPlan& dropout) {
  const int d_model = static_cast<int>(g.value(x).cols());
  if (heads < 1 || d_model % heads != 0)
    throw ConfigError("transformer_layer: heads must divide d_model");
  const int dk = d_model / heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Graph::Id q = affine(g, x, g.param(p.wq), g.param(p.bq));
  Graph::Id k = affine(g, x, g.param(p.wk), g.param(p.bk));
  Graph::Id v = affine(g, x, g.param(p.wv), g.param(p.bv));

  std::vector<Graph::Id> head_outs;
  head_outs.reserve(static_cast<std::size_t>(heads));
  for (int hh = 0; hh < heads; ++hh) {
    Graph::Id qh = g.slice_cols(q, hh * dk, dk);
    Graph::Id kh = g.slice_cols(k, hh * dk, dk);
    Graph::Id vh = g.slice_cols(v, hh * dk, dk);
    Graph::Id scores = g.scale(g.matmul(qh, g.transpose(kh)), inv_sqrt_dk);
    head_outs.push_back(g.matmul(g.softmax_rows(scores), vh));
  }
  Graph::Id attn = head_outs.size() == 1 ? head_outs[0] : g.concat_cols(head_outs);
  attn = affine(g, attn, g.param(p.wo), g.param(p.bo));
  attn = apply_dropout(g, attn, dropout);
  Graph::Id y = g.layer_norm(g.add(x, attn), g.param(p.ln1_g), g.param(p.ln1_b));

  Graph::Id ff = g.relu(affine(g, y, g.param(p.ff_w1), g.param(p.ff_b1)));
  ff = affine(g, ff, g.param(p.ff_w2), g.param(p.ff_b2));
  ff = apply_dropout(g, ff, dropout);
  return g.layer_norm(g.add(y, ff), g.param(p.ln2_g), g.param(p.ln2_b));
}

void init_uniform(Tensor& t, const Rng& base, double bound) {
  Rng r = base.child(t.name);
  for (Eigen::Index i = 0; i < t.value.rows(); ++i)
    for (Eigen::Index j = 0; j < t.value.cols(); ++j)
      t.value(i, j) = r.uniform(-bound, bound);
}

void init_lstm_dir(LstmDirParams& p, const Rng& base) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(p.hidden()));
  init_uniform(p.w_ih, base, bound);
  init_uniform(p.w_hh, base, bound);
  // Biases start at zero except the forget gate, which starts open.
  const int h = p.hidden();
  p.bias.value.setZero();
  p.bias.value.block(0, h, 1, h).setOnes();
}

void init_transformer_layer(TransformerLayerParams& p, const Rng& base) {
  for (Tensor* w : {&p.wq, &p.wk, &p.wv, &p.wo, &p.ff_w1, &p.ff_w2})
    init_uniform(*w, base, 1.0 / std::sqrt(static_cast<double>(w->value.rows())));
  for (Tensor* b : {&p.bq, &p.bk, &p.bv, &p.bo, &p.ff_b1, &p.ff_b2})
    b->value.setZero();
  p.ln1_g.value.setOnes();
  p.ln1_b.value.setZero();
  p.ln2_g.value.setOnes();
  p.ln2_b.value.setZero();
}

}  // namespace hierconv::nn
