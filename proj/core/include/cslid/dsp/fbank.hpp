// core/include/cslid/dsp/fbank.hpp

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

#ifndef CSLID_DSP_FBANK_HPP_
#define CSLID_DSP_FBANK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cslid/dsp/audio.hpp"

namespace cslid {

struct FbankConfig {
  int sample_rate_hz = 16000;
  double frame_length_s = 0.025;
  double frame_shift_s = 0.010;
  int num_bins = 80;
  double low_freq_hz = 20.0;
  double high_freq_hz = 8000.0;
  double preemphasis = 0.97;
};

// Row-major [frames x bins] feature matrix.
struct FeatureMatrix {
  int frames = 0;
  int bins = 0;
  std::vector<float> values;

  float& at(int t, int f) { return values[static_cast<size_t>(t) * bins + f]; }
  float at(int t, int f) const {
    return values[static_cast<size_t>(t) * bins + f];
  }
};

// Log mel filterbank features.  Frames are 25 ms / 10 ms by default, so a
// one-second 16 kHz signal yields 98 frames.  Input shorter than one frame
// yields an empty matrix.
FeatureMatrix extract_fbank(const AudioBuffer& audio, const FbankConfig& cfg);

// Feature cache file: "FBNK" magic, u32 frames, u32 bins, float32 row-major
// payload, all little-endian.
std::vector<uint8_t> encode_features(const FeatureMatrix& m);
FeatureMatrix decode_features(const std::vector<uint8_t>& bytes);
void write_features(const std::string& path, const FeatureMatrix& m);
FeatureMatrix read_features(const std::string& path);

namespace detail {
// In-place radix-2 FFT over interleaved complex data; n must be a power of 2.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);
// Mel scale used by the triangle bank: 1127 * ln(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);
}  // namespace detail

}  // namespace cslid

#endif  // CSLID_DSP_FBANK_HPP_
