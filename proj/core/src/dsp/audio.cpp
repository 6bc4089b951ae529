// core/src/dsp/audio.cpp

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

#include "cslid/dsp/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"

namespace cslid {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32le(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16le(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

// Zeroth-order modified Bessel function, series expansion.
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  double half = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

}  // namespace

AudioBuffer decode_wav(const std::vector<uint8_t>& bytes) {
  CSLID_CHECK(bytes.size() >= 12, ErrorKind::kDecode,
              "wav: file too short for RIFF header");
  CSLID_CHECK(std::memcmp(bytes.data(), "RIFF", 4) == 0, ErrorKind::kDecode,
              "wav: missing RIFF magic");
  CSLID_CHECK(std::memcmp(bytes.data() + 8, "WAVE", 4) == 0, ErrorKind::kDecode,
              "wav: missing WAVE form type");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t chunk_size = read_u32le(chunk + 4);
    size_t body = pos + 8;
    CSLID_CHECK(body + chunk_size <= bytes.size(), ErrorKind::kDecode,
                "wav: chunk overruns file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      CSLID_CHECK(chunk_size >= 16, ErrorKind::kDecode, "wav: fmt chunk short");
      format = read_u16le(bytes.data() + body);
      channels = read_u16le(bytes.data() + body + 2);
      rate = read_u32le(bytes.data() + body + 4);
      bits = read_u16le(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        CSLID_CHECK(chunk_size >= 40, ErrorKind::kDecode,
                    "wav: extensible fmt chunk short");
        format = read_u16le(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  CSLID_CHECK(have_fmt, ErrorKind::kDecode, "wav: no fmt chunk");
  CSLID_CHECK(data != nullptr, ErrorKind::kDecode, "wav: no data chunk");
  CSLID_CHECK(channels >= 1, ErrorKind::kDecode, "wav: zero channels");
  CSLID_CHECK(rate >= 1, ErrorKind::kDecode, "wav: zero sample rate");

  bool pcm16 = format == kFormatPcm && bits == 16;
  bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw_error(ErrorKind::kUnsupported,
                "wav: only PCM16 and float32 are handled, got format " +
                    std::to_string(format) + " with " + std::to_string(bits) +
                    " bits");
  }

  size_t bytes_per_sample = pcm16 ? 2 : 4;
  size_t frame_bytes = bytes_per_sample * channels;
  CSLID_CHECK(data_size % frame_bytes == 0, ErrorKind::kDecode,
              "wav: data chunk not a whole number of frames");
  size_t frames = data_size / frame_bytes;

  AudioBuffer out;
  out.sample_rate_hz = static_cast<int>(rate);
  out.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (uint16_t c = 0; c < channels; ++c) {
      const uint8_t* p = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
        acc += v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        acc += v;
      }
    }
    out.samples[i] = static_cast<float>(acc / channels);
  }
  return out;
}

AudioBuffer read_wav(const std::string& path) {
  return decode_wav(read_file_bytes(path));
}

std::vector<uint8_t> encode_wav_pcm16(const AudioBuffer& audio) {
  CSLID_CHECK(audio.sample_rate_hz > 0, ErrorKind::kArgument,
              "wav: sample rate must be positive");
  uint32_t data_size = static_cast<uint32_t>(audio.samples.size() * 2);
  ByteWriter w;
  w.raw("RIFF", 4);
  w.u32(36 + data_size);
  w.raw("WAVE", 4);
  w.raw("fmt ", 4);
  w.u32(16);
  uint32_t rate = static_cast<uint32_t>(audio.sample_rate_hz);
  uint16_t block_align = 2;
  w.bytes.push_back(kFormatPcm & 0xFF);
  w.bytes.push_back(0);
  w.bytes.push_back(1);  // mono
  w.bytes.push_back(0);
  w.u32(rate);
  w.u32(rate * block_align);
  w.bytes.push_back(block_align & 0xFF);
  w.bytes.push_back(0);
  w.bytes.push_back(16);  // bits per sample
  w.bytes.push_back(0);
  w.raw("data", 4);
  w.u32(data_size);
  for (float s : audio.samples) {
    float clamped = std::min(1.0f, std::max(-1.0f, s));
    int v = static_cast<int>(std::lrint(clamped * 32767.0));
    w.bytes.push_back(static_cast<uint8_t>(v & 0xFF));
    w.bytes.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  }
  return std::move(w.bytes);
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  write_file_bytes(path, encode_wav_pcm16(audio));
}

namespace detail {

std::vector<float> resample_ratio(const std::vector<float>& in, double ratio) {
  CSLID_CHECK(ratio > 0.0, ErrorKind::kArgument,
              "resample: ratio must be positive");
  if (in.empty()) return {};

  constexpr int kHalfTaps = 32;
  constexpr double kKaiserBeta = 8.6;
  const double cutoff = std::min(1.0, ratio);  // anti-alias when downsampling
  const double i0_beta = bessel_i0(kKaiserBeta);

  size_t out_len = static_cast<size_t>(
      std::llround(static_cast<double>(in.size()) * ratio));
  std::vector<float> out(out_len);

  for (size_t j = 0; j < out_len; ++j) {
    double center = static_cast<double>(j) / ratio;
    long first = static_cast<long>(std::ceil(center)) - kHalfTaps;
    double acc = 0.0;
    for (long i = first; i < first + 2 * kHalfTaps; ++i) {
      if (i < 0 || i >= static_cast<long>(in.size())) continue;
      double t = (static_cast<double>(i) - center) * cutoff;
      double sinc = t == 0.0 ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
      double frac = (static_cast<double>(i) - center) / kHalfTaps * cutoff;
      if (frac < -1.0 || frac > 1.0) continue;
      double window = bessel_i0(kKaiserBeta * std::sqrt(1.0 - frac * frac)) /
                      i0_beta;
      acc += in[i] * sinc * cutoff * window;
    }
    out[j] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace detail

AudioBuffer resample(const AudioBuffer& audio, int target_rate_hz) {
  CSLID_CHECK(target_rate_hz > 0, ErrorKind::kArgument,
              "resample: target rate must be positive");
  if (audio.sample_rate_hz == target_rate_hz) return audio;
  AudioBuffer out;
  out.sample_rate_hz = target_rate_hz;
  double ratio = static_cast<double>(target_rate_hz) / audio.sample_rate_hz;
  out.samples = detail::resample_ratio(audio.samples, ratio);
  return out;
}

AudioBuffer speed_perturb(const AudioBuffer& audio, double factor) {
  CSLID_CHECK(factor > 0.0, ErrorKind::kArgument,
              "speed_perturb: factor must be positive");
  if (factor == 1.0) return audio;
  AudioBuffer out;
  out.sample_rate_hz = audio.sample_rate_hz;
  out.samples = detail::resample_ratio(audio.samples, 1.0 / factor);
  return out;
}

AudioBuffer slice(const AudioBuffer& audio, double offset_s,
                  double duration_s) {
  CSLID_CHECK(offset_s >= 0.0 && duration_s >= 0.0, ErrorKind::kArgument,
              "slice: offset and duration must be non-negative");
  size_t begin = static_cast<size_t>(
      std::llround(offset_s * audio.sample_rate_hz));
  size_t count = static_cast<size_t>(
      std::llround(duration_s * audio.sample_rate_hz));
  begin = std::min(begin, audio.samples.size());
  count = std::min(count, audio.samples.size() - begin);
  AudioBuffer out;
  out.sample_rate_hz = audio.sample_rate_hz;
  out.samples.assign(audio.samples.begin() + begin,
                     audio.samples.begin() + begin + count);
  return out;
}

}  // namespace cslid
