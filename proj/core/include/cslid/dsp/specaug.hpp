// core/include/cslid/dsp/specaug.hpp

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

#ifndef CSLID_DSP_SPECAUG_HPP_
#define CSLID_DSP_SPECAUG_HPP_

#include "cslid/common/rng.hpp"
#include "cslid/dsp/fbank.hpp"

namespace cslid {

// Spectrogram augmentation: a time warp followed by frequency and time
// masks.  Masked cells are filled with the per-utterance mean computed
// before any masking.  All-zero parameters leave the input untouched.
struct SpecAugmentConfig {
  int time_warp_window = 80;    // max displacement of the warp anchor
  int num_freq_masks = 2;
  int max_freq_mask_width = 27;
  int num_time_masks = 2;
  int max_time_mask_width = 100;  // additionally capped at frames / 5

  bool is_identity() const {
    return time_warp_window == 0 &&
           (num_freq_masks == 0 || max_freq_mask_width == 0) &&
           (num_time_masks == 0 || max_time_mask_width == 0);
  }
};

FeatureMatrix apply_specaugment(const FeatureMatrix& features,
                                const SpecAugmentConfig& cfg, Rng& rng);

}  // namespace cslid

#endif  // CSLID_DSP_SPECAUG_HPP_
