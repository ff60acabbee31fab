// hierconv/features.cpp

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

#include "hierconv/features.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hierconv/errors.hpp"

namespace hierconv::features {

namespace {

// One pass of the regression filter with edge replication.
Mat delta_filter(const Mat& x, int window) {
  const Eigen::Index T = x.rows();
  double norm = 0.0;
  for (int n = 1; n <= window; ++n) norm += static_cast<double>(n) * n;
  norm *= 2.0;

  Mat d = Mat::Zero(T, x.cols());
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int n = 1; n <= window; ++n) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + n, T - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - n, 0);
      d.row(t) += static_cast<double>(n) * (x.row(ahead) - x.row(behind));
    }
    d.row(t) /= norm;
  }
  return d;
}

}  // namespace

FeatureSequence compute_deltas(const FeatureSequence& seq, int window) {
  if (seq.frames.rows() < 1 || seq.frames.cols() < 1)
    throw DataError("compute_deltas: empty feature sequence");
  if (window < 1) throw DataError("compute_deltas: window must be >= 1");
  if (!seq.frames.allFinite())
    throw DataError("compute_deltas: non-finite value in feature sequence");

  const Mat& base = seq.frames;
  Mat d1 = delta_filter(base, window);
  Mat d2 = delta_filter(d1, window);

  FeatureSequence out;
  out.frame_period_ms = seq.frame_period_ms;
  out.frames.resize(base.rows(), 3 * base.cols());
  out.frames << base, d1, d2;
  return out;
}

FeatureSequence stack_and_skip(const FeatureSequence& seq) {
  const Eigen::Index T = seq.frames.rows();
  const Eigen::Index D = seq.frames.cols();
  if (T < 1) throw DataError("stack_and_skip: empty feature sequence");

  const Eigen::Index out_T = (T + 1) / 2;
  FeatureSequence out;
  out.frame_period_ms = 2.0 * seq.frame_period_ms;
  out.frames.resize(out_T, 2 * D);
  for (Eigen::Index t = 0; t < out_T; ++t) {
    const Eigen::Index first = 2 * t;
    const Eigen::Index second = std::min<Eigen::Index>(2 * t + 1, T - 1);
    out.frames.row(t).head(D) = seq.frames.row(first);
    out.frames.row(t).tail(D) = seq.frames.row(second);
  }
  return out;
}

FeatureSequence drop_frames(const FeatureSequence& seq,
                            const DropFrameConfig& cfg, Rng& rng) {
  if (cfg.max_len < 1) throw DataError("drop_frames: max_len must be >= 1");
  const Eigen::Index T = seq.frames.rows();
  if (!cfg.enabled || T <= cfg.max_len) return seq;

  std::vector<int> idx(static_cast<std::size_t>(T));
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  idx.resize(static_cast<std::size_t>(cfg.max_len));
  std::sort(idx.begin(), idx.end());

  FeatureSequence out;
  out.frame_period_ms = seq.frame_period_ms;
  out.frames.resize(cfg.max_len, seq.frames.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.frames.row(static_cast<Eigen::Index>(i)) = seq.frames.row(idx[i]);
  return out;
}

FeatureSequence pipeline(const FeatureSequence& base, int delta_window) {
  return stack_and_skip(compute_deltas(base, delta_window));
}

}  // namespace hierconv::features
