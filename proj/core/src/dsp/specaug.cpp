// core/src/dsp/specaug.cpp

// Copyright 2026  CSLID Contributors

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

#include "cslid/dsp/specaug.hpp"

#include <algorithm>
#include <cmath>

namespace cslid {

namespace {

// Warps the time axis with a single anchor: frames in [0, w0) map linearly
// onto [0, w0 + w) and frames in [w0, T) onto [w0 + w, T).  Each output
// frame interpolates between its two nearest source frames.
FeatureMatrix time_warp(const FeatureMatrix& in, int window, Rng& rng) {
  int T = in.frames;
  if (T < 2 * window + 2) return in;  // too short to anchor a warp

  int w0 = rng.uniform_int(window, T - window - 1);
  int w = rng.uniform_int(-window, window);
  if (w == 0) return in;

  FeatureMatrix out;
  out.frames = T;
  out.bins = in.bins;
  out.values.resize(in.values.size());

  int anchor = w0 + w;
  for (int t = 0; t < T; ++t) {
    double src;
    if (t <= anchor) {
      src = anchor == 0 ? 0.0 : static_cast<double>(t) * w0 / anchor;
    } else {
      src = w0 + static_cast<double>(t - anchor) * (T - 1 - w0) /
                     (T - 1 - anchor);
    }
    int lo = static_cast<int>(std::floor(src));
    int hi = std::min(lo + 1, T - 1);
    double frac = src - lo;
    for (int f = 0; f < in.bins; ++f) {
      out.at(t, f) = static_cast<float>((1.0 - frac) * in.at(lo, f) +
                                        frac * in.at(hi, f));
    }
  }
  return out;
}

}  // namespace

FeatureMatrix apply_specaugment(const FeatureMatrix& features,
                                const SpecAugmentConfig& cfg, Rng& rng) {
  if (cfg.is_identity() || features.frames == 0) return features;

  double mean = 0.0;
  for (float v : features.values) mean += v;
  mean /= static_cast<double>(features.values.size());
  float fill = static_cast<float>(mean);

  FeatureMatrix out = cfg.time_warp_window > 0
                          ? time_warp(features, cfg.time_warp_window, rng)
                          : features;

  int T = out.frames, F = out.bins;
  for (int i = 0; i < cfg.num_freq_masks; ++i) {
    int width = rng.uniform_int(0, std::min(cfg.max_freq_mask_width, F));
    if (width == 0) continue;
    int f0 = rng.uniform_int(0, F - width);
    for (int t = 0; t < T; ++t) {
      for (int f = f0; f < f0 + width; ++f) out.at(t, f) = fill;
    }
  }

  int time_cap = std::min(cfg.max_time_mask_width, T / 5);
  for (int i = 0; i < cfg.num_time_masks; ++i) {
    int width = rng.uniform_int(0, std::max(time_cap, 0));
    if (width == 0) continue;
    int t0 = rng.uniform_int(0, T - width);
    for (int t = t0; t < t0 + width; ++t) {
      for (int f = 0; f < F; ++f) out.at(t, f) = fill;
    }
  }
  return out;
}

}  // namespace cslid
