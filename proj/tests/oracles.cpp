// tests/oracles.cpp

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

#include "oracles.hpp"

#include <cmath>

namespace oracle {

namespace {

using hierconv::Mat;

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// One LSTM direction over a list of input vectors; returns hidden states per
// timestep (input order) and writes the final state.
std::vector<Vec> lstm_dir(const hierconv::nn::LstmDirParams& p,
                          const std::vector<Vec>& xs, bool reverse,
                          Vec* final_h) {
  const int T = static_cast<int>(xs.size());
  const int h = p.hidden();
  const int in_dim = static_cast<int>(p.w_ih.value.rows());
  Vec hs(static_cast<std::size_t>(h), 0.0), cs(static_cast<std::size_t>(h), 0.0);
  std::vector<Vec> out(static_cast<std::size_t>(T));
  for (int step = 0; step < T; ++step) {
    const int t = reverse ? T - 1 - step : step;
    const Vec& x = xs[static_cast<std::size_t>(t)];
    Vec pre(static_cast<std::size_t>(4 * h), 0.0);
    for (int j = 0; j < 4 * h; ++j) {
      double acc = p.bias.value(0, j);
      for (int i = 0; i < in_dim; ++i) acc += x[static_cast<std::size_t>(i)] * p.w_ih.value(i, j);
      for (int i = 0; i < h; ++i) acc += hs[static_cast<std::size_t>(i)] * p.w_hh.value(i, j);
      pre[static_cast<std::size_t>(j)] = acc;
    }
    Vec h_new(static_cast<std::size_t>(h)), c_new(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) {
      const double gi = sigmoid(pre[static_cast<std::size_t>(k)]);
      const double gf = sigmoid(pre[static_cast<std::size_t>(h + k)]);
      const double gc = std::tanh(pre[static_cast<std::size_t>(2 * h + k)]);
      const double go = sigmoid(pre[static_cast<std::size_t>(3 * h + k)]);
      c_new[static_cast<std::size_t>(k)] =
          gf * cs[static_cast<std::size_t>(k)] + gi * gc;
      h_new[static_cast<std::size_t>(k)] =
          go * std::tanh(c_new[static_cast<std::size_t>(k)]);
    }
    hs = h_new;
    cs = c_new;
    out[static_cast<std::size_t>(t)] = hs;
  }
  *final_h = hs;
  return out;
}

// Layer norm over one row vector, population variance, eps 1e-5.
Vec layer_norm(const Vec& x, const Mat& gamma, const Mat& beta) {
  const int m = static_cast<int>(x.size());
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= m;
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  var /= m;
  const double inv_s = 1.0 / std::sqrt(var + 1e-5);
  Vec out(x.size());
  for (int j = 0; j < m; ++j)
    out[static_cast<std::size_t>(j)] =
        (x[static_cast<std::size_t>(j)] - mu) * inv_s * gamma(0, j) + beta(0, j);
  return out;
}

Vec affine_row(const Vec& x, const Mat& w, const Mat& b) {
  Vec out(static_cast<std::size_t>(w.cols()), 0.0);
  for (int j = 0; j < w.cols(); ++j) {
    double acc = b.size() > 0 ? b(0, j) : 0.0;
    for (int i = 0; i < w.rows(); ++i) acc += x[static_cast<std::size_t>(i)] * w(i, j);
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

// One post-layer-norm transformer encoder layer over a list of rows.
std::vector<Vec> transformer_layer(
    const hierconv::nn::TransformerLayerParams& p, const std::vector<Vec>& x,
    int heads) {
  const int n = static_cast<int>(x.size());
  const int d = static_cast<int>(p.wq.value.rows());
  const int dk = d / heads;
  std::vector<Vec> q(x.size()), k(x.size()), v(x.size());
  for (int r = 0; r < n; ++r) {
    q[static_cast<std::size_t>(r)] = affine_row(x[static_cast<std::size_t>(r)], p.wq.value, p.bq.value);
    k[static_cast<std::size_t>(r)] = affine_row(x[static_cast<std::size_t>(r)], p.wk.value, p.bk.value);
    v[static_cast<std::size_t>(r)] = affine_row(x[static_cast<std::size_t>(r)], p.wv.value, p.bv.value);
  }
  std::vector<Vec> attn(x.size(), Vec(static_cast<std::size_t>(d), 0.0));
  for (int head = 0; head < heads; ++head) {
    const int off = head * dk;
    for (int r = 0; r < n; ++r) {
      Vec scores(static_cast<std::size_t>(n), 0.0);
      for (int c = 0; c < n; ++c) {
        double dot = 0.0;
        for (int j = 0; j < dk; ++j)
          dot += q[static_cast<std::size_t>(r)][static_cast<std::size_t>(off + j)] *
                 k[static_cast<std::size_t>(c)][static_cast<std::size_t>(off + j)];
        scores[static_cast<std::size_t>(c)] = dot / std::sqrt(static_cast<double>(dk));
      }
      double mx = scores[0];
      for (double s : scores) mx = std::max(mx, s);
      double z = 0.0;
      for (double& s : scores) {
        s = std::exp(s - mx);
        z += s;
      }
      for (int c = 0; c < n; ++c) {
        const double w = scores[static_cast<std::size_t>(c)] / z;
        for (int j = 0; j < dk; ++j)
          attn[static_cast<std::size_t>(r)][static_cast<std::size_t>(off + j)] +=
              w * v[static_cast<std::size_t>(c)][static_cast<std::size_t>(off + j)];
      }
    }
  }
  std::vector<Vec> out(x.size());
  for (int r = 0; r < n; ++r) {
    Vec proj = affine_row(attn[static_cast<std::size_t>(r)], p.wo.value, p.bo.value);
    Vec res(x[static_cast<std::size_t>(r)]);
    for (int j = 0; j < d; ++j) res[static_cast<std::size_t>(j)] += proj[static_cast<std::size_t>(j)];
    Vec y = layer_norm(res, p.ln1_g.value, p.ln1_b.value);
    Vec ff = affine_row(y, p.ff_w1.value, p.ff_b1.value);
    for (double& f : ff) f = std::max(f, 0.0);
    Vec ff2 = affine_row(ff, p.ff_w2.value, p.ff_b2.value);
    for (int j = 0; j < d; ++j) ff2[static_cast<std::size_t>(j)] += y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(r)] = layer_norm(ff2, p.ln2_g.value, p.ln2_b.value);
  }
  return out;
}

}  // namespace

Vec speech_encoder(const hierconv::encoders::SpeechEncoderParams& params,
                   const Mat& frames) {
  std::vector<Vec> xs(static_cast<std::size_t>(frames.rows()));
  for (int t = 0; t < frames.rows(); ++t) {
    xs[static_cast<std::size_t>(t)].resize(static_cast<std::size_t>(frames.cols()));
    for (int j = 0; j < frames.cols(); ++j)
      xs[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = frames(t, j);
  }
  Vec fwd_final, bwd_final;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    std::vector<Vec> fh = lstm_dir(params.layers[l].fwd, xs, false, &fwd_final);
    std::vector<Vec> bh = lstm_dir(params.layers[l].bwd, xs, true, &bwd_final);
    std::vector<Vec> next(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
      next[t] = fh[t];
      next[t].insert(next[t].end(), bh[t].begin(), bh[t].end());
    }
    xs = std::move(next);
  }
  Vec state = fwd_final;
  state.insert(state.end(), bwd_final.begin(), bwd_final.end());
  return affine_row(state, params.proj_w.value, params.proj_b.value);
}

Vec text_encoder(const hierconv::encoders::TextEncoderParams& params,
                 const std::vector<int>& tokens) {
  const int d = params.cfg.d_model;
  std::vector<Vec> x(tokens.size() + 1, Vec(static_cast<std::size_t>(d), 0.0));
  for (int j = 0; j < d; ++j)
    x[0][static_cast<std::size_t>(j)] =
        params.cls_emb.value(0, j) + params.pos_emb.value(0, j);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    for (int j = 0; j < d; ++j)
      x[i + 1][static_cast<std::size_t>(j)] =
          params.token_emb.value(tokens[i], j) +
          params.pos_emb.value(static_cast<int>(i) + 1, j);
  for (const auto& layer : params.layers)
    x = transformer_layer(layer, x, params.cfg.heads);
  return x[0];
}

Vec conversation_encoder(
    const hierconv::conversation::ConversationEncoderParams& params,
    const Mat& utts) {
  const int n = static_cast<int>(utts.rows());
  const int d = params.cfg.d_model;
  std::vector<Vec> x(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(d), 0.0));
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = utts(r, j);

  if (params.cfg.variant == hierconv::conversation::Variant::kTransformer) {
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < d; ++j)
        x[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] += params.pos_emb.value(r, j);
    for (const auto& layer : params.layers)
      x = transformer_layer(layer, x, params.cfg.heads);
    return x[static_cast<std::size_t>(n - 1)];
  }

  Vec fwd_final, bwd_final;
  lstm_dir(params.recurrent.fwd, x, false, &fwd_final);
  lstm_dir(params.recurrent.bwd, x, true, &bwd_final);
  Vec out(fwd_final.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = fwd_final[j] + bwd_final[j];
  return out;
}

Vec classifier(const Mat& w, const Mat& b, const Vec& x) {
  return affine_row(x, w, b);
}

double max_abs_diff(const Vec& a, const Mat& row) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    m = std::max(m, std::abs(a[j] - row(0, static_cast<Eigen::Index>(j))));
  return m;
}

}  // namespace oracle
