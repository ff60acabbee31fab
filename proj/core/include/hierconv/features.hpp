// hierconv/features.hpp

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

#ifndef HIERCONV_FEATURES_HPP_
#define HIERCONV_FEATURES_HPP_

#include "hierconv/rng.hpp"
#include "hierconv/tensor.hpp"

namespace hierconv::features {

/// Time-major acoustic features for one utterance: frames.row(t) is the
/// feature vector at frame t.
struct FeatureSequence {
  Mat frames;                    // T x D
  double frame_period_ms = 10.0;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

struct DropFrameConfig {
  int max_len = 256;  // l
  bool enabled = true;
};

/// Appends delta and delta-delta blocks: output dimension is 3*D, same T.
/// Deltas use the regression formula with window W = 2 and edge replication:
///   d_t = sum_{n=1..W} n * (f_{t+n} - f_{t-n}) / (2 * sum_{n=1..W} n^2)
/// Delta-delta is the same filter applied to the delta block.
/// Throws DataError if the input contains non-finite values or is empty.
FeatureSequence compute_deltas(const FeatureSequence& seq, int window = 2);

/// Concatenates frame pairs (2t, 2t+1) and drops the odd frames: output
/// length is ceil(T/2) with last-frame replication for odd T, dimension
/// doubles, and the frame period doubles.
FeatureSequence stack_and_skip(const FeatureSequence& seq);

/// Training-time augmentation: if enabled and T > l, keeps exactly l frames
/// chosen uniformly at random without replacement, preserving temporal
/// order. Otherwise returns the input unchanged. Deterministic given rng.
FeatureSequence drop_frames(const FeatureSequence& seq,
                            const DropFrameConfig& cfg, Rng& rng);

/// compute_deltas followed by stack_and_skip. Base dimension D becomes 6*D.
FeatureSequence pipeline(const FeatureSequence& base, int delta_window = 2);

}  // namespace hierconv::features

#endif  // HIERCONV_FEATURES_HPP_
