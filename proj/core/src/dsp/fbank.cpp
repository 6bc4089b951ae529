// core/src/dsp/fbank.cpp

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

#include "cslid/dsp/fbank.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"

namespace cslid {

namespace detail {

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  size_t n = re.size();
  CSLID_CHECK(n == im.size() && n > 0 && (n & (n - 1)) == 0,
              ErrorKind::kArgument, "fft: size must be a power of two");

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        size_t a = i + k, b = i + k + len / 2;
        double tr = re[b] * cr - im[b] * ci;
        double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

double hz_to_mel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

}  // namespace detail

namespace {

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Triangle weights laid out as [bins][fft_bins/2 + 1].
std::vector<std::vector<float>> build_mel_bank(const FbankConfig& cfg,
                                               size_t fft_size) {
  size_t half = fft_size / 2 + 1;
  double nyquist = cfg.sample_rate_hz / 2.0;
  double high = std::min(cfg.high_freq_hz, nyquist);
  CSLID_CHECK(cfg.low_freq_hz < high, ErrorKind::kConfig,
              "fbank: low_freq_hz must be below high_freq_hz");
  double mel_lo = detail::hz_to_mel(cfg.low_freq_hz);
  double mel_hi = detail::hz_to_mel(high);

  std::vector<double> centers(cfg.num_bins + 2);
  for (int m = 0; m < cfg.num_bins + 2; ++m) {
    centers[m] = detail::mel_to_hz(
        mel_lo + (mel_hi - mel_lo) * m / (cfg.num_bins + 1));
  }

  std::vector<std::vector<float>> bank(cfg.num_bins,
                                       std::vector<float>(half, 0.0f));
  double hz_per_bin = static_cast<double>(cfg.sample_rate_hz) / fft_size;
  for (int m = 0; m < cfg.num_bins; ++m) {
    double left = centers[m], center = centers[m + 1], right = centers[m + 2];
    for (size_t k = 0; k < half; ++k) {
      double f = k * hz_per_bin;
      if (f <= left || f >= right) continue;
      double w = f <= center ? (f - left) / (center - left)
                             : (right - f) / (right - center);
      bank[m][k] = static_cast<float>(w);
    }
  }
  return bank;
}

}  // namespace

FeatureMatrix extract_fbank(const AudioBuffer& audio, const FbankConfig& cfg) {
  CSLID_CHECK(cfg.num_bins > 0, ErrorKind::kConfig,
              "fbank: num_bins must be positive");
  CSLID_CHECK(audio.sample_rate_hz == cfg.sample_rate_hz, ErrorKind::kArgument,
              "fbank: audio rate " + std::to_string(audio.sample_rate_hz) +
                  " differs from configured " +
                  std::to_string(cfg.sample_rate_hz));

  const int frame_len =
      static_cast<int>(std::lrint(cfg.frame_length_s * cfg.sample_rate_hz));
  const int shift =
      static_cast<int>(std::lrint(cfg.frame_shift_s * cfg.sample_rate_hz));
  CSLID_CHECK(frame_len > 1 && shift > 0, ErrorKind::kConfig,
              "fbank: degenerate frame geometry");

  FeatureMatrix out;
  out.bins = cfg.num_bins;
  if (static_cast<long>(audio.samples.size()) < frame_len) {
    out.frames = 0;
    return out;
  }
  out.frames = 1 + static_cast<int>((audio.samples.size() - frame_len) / shift);
  out.values.resize(static_cast<size_t>(out.frames) * cfg.num_bins);

  const size_t fft_size = next_pow2(static_cast<size_t>(frame_len));
  const size_t half = fft_size / 2 + 1;
  auto bank = build_mel_bank(cfg, fft_size);

  std::vector<double> window(frame_len);
  for (int n = 0; n < frame_len; ++n) {
    window[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (frame_len - 1));
  }

  std::vector<double> re(fft_size), im(fft_size), power(half);
  for (int t = 0; t < out.frames; ++t) {
    const float* frame = audio.samples.data() + static_cast<size_t>(t) * shift;
    // Pre-emphasis is applied within the frame; the first sample is
    // differenced against itself.
    re[0] = (frame[0] - cfg.preemphasis * frame[0]) * window[0];
    for (int n = 1; n < frame_len; ++n) {
      re[n] = (frame[n] - cfg.preemphasis * frame[n - 1]) * window[n];
    }
    std::fill(re.begin() + frame_len, re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    detail::fft_radix2(re, im);
    for (size_t k = 0; k < half; ++k) {
      power[k] = re[k] * re[k] + im[k] * im[k];
    }
    for (int m = 0; m < cfg.num_bins; ++m) {
      double acc = 0.0;
      const auto& row = bank[m];
      for (size_t k = 0; k < half; ++k) acc += row[k] * power[k];
      out.at(t, m) = static_cast<float>(std::log(std::max(acc, 1e-10)));
    }
  }
  return out;
}

std::vector<uint8_t> encode_features(const FeatureMatrix& m) {
  ByteWriter w;
  w.raw("FBNK", 4);
  w.u32(static_cast<uint32_t>(m.frames));
  w.u32(static_cast<uint32_t>(m.bins));
  for (float v : m.values) w.f32(v);
  return std::move(w.bytes);
}

FeatureMatrix decode_features(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes.data(), bytes.size());
  char magic[4];
  r.raw(magic, 4);
  CSLID_CHECK(std::memcmp(magic, "FBNK", 4) == 0, ErrorKind::kIntegrity,
              "feature cache: bad magic");
  FeatureMatrix m;
  m.frames = static_cast<int>(r.u32());
  m.bins = static_cast<int>(r.u32());
  size_t count = static_cast<size_t>(m.frames) * m.bins;
  m.values.resize(count);
  for (size_t i = 0; i < count; ++i) m.values[i] = r.f32();
  CSLID_CHECK(r.exhausted(), ErrorKind::kIntegrity,
              "feature cache: trailing bytes");
  return m;
}

void write_features(const std::string& path, const FeatureMatrix& m) {
  write_file_bytes(path, encode_features(m));
}

FeatureMatrix read_features(const std::string& path) {
  return decode_features(read_file_bytes(path));
}

}  // namespace cslid
