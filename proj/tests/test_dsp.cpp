// tests/test_dsp.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cslid/common/error.hpp"
#include "cslid/common/rng.hpp"
#include "cslid/dsp/audio.hpp"
#include "cslid/dsp/fbank.hpp"
#include "cslid/dsp/specaug.hpp"
#include "testing.hpp"

using namespace cslid;

namespace {

AudioBuffer sine(double freq_hz, double duration_s, int rate) {
  AudioBuffer a;
  a.sample_rate_hz = rate;
  int n = static_cast<int>(std::lround(duration_s * rate));
  a.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    a.samples[i] =
        static_cast<float>(0.5 * std::sin(2.0 * M_PI * freq_hz * i / rate));
  }
  return a;
}

}  // namespace

TEST_CASE("wav pcm16 round trip") {
  AudioBuffer a = sine(440.0, 0.25, 16000);
  std::vector<uint8_t> bytes = encode_wav_pcm16(a);
  AudioBuffer b = decode_wav(bytes);
  REQUIRE(b.sample_rate_hz == 16000);
  REQUIRE(b.samples.size() == a.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    // 16-bit quantization error bound.
    CHECK(std::abs(a.samples[i] - b.samples[i]) <= 1.0f / 32767.0f + 1e-6f);
  }
}

TEST_CASE("wav file io") {
  testing::TempDir tmp;
  AudioBuffer a = sine(220.0, 0.1, 8000);
  write_wav(tmp.file("a.wav"), a);
  AudioBuffer b = read_wav(tmp.file("a.wav"));
  CHECK(b.sample_rate_hz == 8000);
  CHECK(b.samples.size() == a.samples.size());
}

TEST_CASE("wav decode rejects garbage") {
  std::vector<uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0, 0, 0,
                               'J', 'U', 'N', 'K'};
  CHECK_THROWS_AS(decode_wav(junk), Error);
}

TEST_CASE("resample same rate is identity") {
  AudioBuffer a = sine(100.0, 0.05, 16000);
  AudioBuffer b = resample(a, 16000);
  CHECK(b.samples == a.samples);
}

TEST_CASE("resample halves and doubles length") {
  AudioBuffer a = sine(200.0, 0.5, 16000);
  AudioBuffer down = resample(a, 8000);
  CHECK(down.sample_rate_hz == 8000);
  CHECK(std::abs(static_cast<long>(down.samples.size()) - 4000) <= 1);
  AudioBuffer up = resample(a, 32000);
  CHECK(std::abs(static_cast<long>(up.samples.size()) - 16000) <= 1);
}

TEST_CASE("resample preserves a mid-band tone") {
  AudioBuffer a = sine(440.0, 0.5, 16000);
  AudioBuffer b = resample(a, 8000);
  // Compare against the directly synthesized tone away from the edges.
  AudioBuffer ref = sine(440.0, 0.5, 8000);
  double err = 0.0;
  int n = static_cast<int>(std::min(b.samples.size(), ref.samples.size()));
  for (int i = 200; i < n - 200; ++i) {
    err = std::max(err, std::abs(static_cast<double>(b.samples[i]) -
                                 ref.samples[i]));
  }
  CHECK(err < 0.01);
}

TEST_CASE("speed perturbation scales duration and keeps rate") {
  AudioBuffer a = sine(300.0, 1.0, 16000);
  AudioBuffer fast = speed_perturb(a, 1.1);
  AudioBuffer slow = speed_perturb(a, 0.9);
  CHECK(fast.sample_rate_hz == 16000);
  CHECK(slow.sample_rate_hz == 16000);
  CHECK(fast.samples.size() ==
        static_cast<size_t>(std::lround(16000 / 1.1)));
  CHECK(slow.samples.size() ==
        static_cast<size_t>(std::lround(16000 / 0.9)));
}

TEST_CASE("slice clamps to available samples") {
  AudioBuffer a = sine(300.0, 1.0, 16000);
  AudioBuffer cut = slice(a, 0.25, 0.5);
  CHECK(cut.samples.size() == 8000);
  CHECK(cut.samples[0] == a.samples[4000]);
  AudioBuffer past = slice(a, 0.9, 0.5);
  CHECK(past.samples.size() == 1600);
}

TEST_CASE("fbank frame geometry") {
  FbankConfig cfg;
  AudioBuffer a = sine(1000.0, 1.0, 16000);
  FeatureMatrix m = extract_fbank(a, cfg);
  // 25 ms window, 10 ms shift: 1 + (16000 - 400) / 160 frames.
  CHECK(m.frames == 98);
  CHECK(m.bins == 80);
  AudioBuffer two = sine(1000.0, 2.0, 16000);
  CHECK(extract_fbank(two, cfg).frames == 198);
  AudioBuffer tiny = sine(1000.0, 0.01, 16000);
  CHECK(extract_fbank(tiny, cfg).frames == 0);
}

TEST_CASE("fbank requires matching sample rate") {
  FbankConfig cfg;
  AudioBuffer a = sine(1000.0, 0.5, 8000);
  CHECK_THROWS_AS(extract_fbank(a, cfg), Error);
}

TEST_CASE("fbank concentrates energy at the tone frequency") {
  FbankConfig cfg;
  AudioBuffer low = sine(500.0, 1.0, 16000);
  AudioBuffer high = sine(3200.0, 1.0, 16000);
  FeatureMatrix ml = extract_fbank(low, cfg);
  FeatureMatrix mh = extract_fbank(high, cfg);
  auto peak_bin = [](const FeatureMatrix& m) {
    int best = 0;
    double best_v = -1e30;
    for (int f = 0; f < m.bins; ++f) {
      double s = 0.0;
      for (int t = 0; t < m.frames; ++t) s += m.at(t, f);
      if (s > best_v) {
        best_v = s;
        best = f;
      }
    }
    return best;
  };
  CHECK(peak_bin(ml) < peak_bin(mh));
}

TEST_CASE("fbank log floor bounds silence") {
  FbankConfig cfg;
  AudioBuffer silent;
  silent.sample_rate_hz = 16000;
  silent.samples.assign(16000, 0.0f);
  FeatureMatrix m = extract_fbank(silent, cfg);
  for (float v : m.values) CHECK(v >= std::log(1e-10f) - 1e-3f);
}

TEST_CASE("feature cache file round trip") {
  testing::TempDir tmp;
  FeatureMatrix m;
  m.frames = 3;
  m.bins = 4;
  m.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  write_features(tmp.file("m.fbnk"), m);
  FeatureMatrix r = read_features(tmp.file("m.fbnk"));
  CHECK(r.frames == 3);
  CHECK(r.bins == 4);
  CHECK(r.values == m.values);
}

TEST_CASE("feature cache rejects bad magic") {
  std::vector<uint8_t> bytes = {'J', 'U', 'N', 'K', 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(decode_features(bytes), Error);
}

TEST_CASE("specaugment zero config is identity") {
  Rng rng(5);
  AudioBuffer a = sine(800.0, 1.0, 16000);
  FeatureMatrix m = extract_fbank(a, FbankConfig{});
  SpecAugmentConfig cfg;
  cfg.time_warp_window = 0;
  cfg.num_freq_masks = 0;
  cfg.num_time_masks = 0;
  CHECK(cfg.is_identity());
  FeatureMatrix out = apply_specaugment(m, cfg, rng);
  CHECK(out.values == m.values);
}

TEST_CASE("specaugment masks are bounded and filled with the mean") {
  Rng rng(7);
  FeatureMatrix m;
  m.frames = 120;
  m.bins = 80;
  m.values.resize(static_cast<size_t>(m.frames) * m.bins);
  Rng data_rng(3);
  for (auto& v : m.values) v = static_cast<float>(data_rng.normal());
  double mean =
      std::accumulate(m.values.begin(), m.values.end(), 0.0) / m.values.size();

  SpecAugmentConfig cfg;
  cfg.time_warp_window = 0;  // keep cells comparable one to one
  FeatureMatrix out = apply_specaugment(m, cfg, rng);
  REQUIRE(out.frames == m.frames);
  REQUIRE(out.bins == m.bins);

  // Every changed cell holds the pre-mask mean.
  long changed = 0;
  for (size_t i = 0; i < m.values.size(); ++i) {
    if (out.values[i] != m.values[i]) {
      ++changed;
      CHECK(out.values[i] == doctest::Approx(mean).epsilon(1e-4));
    }
  }
  CHECK(changed > 0);

  // Fully masked frames count is bounded by the time mask caps: two masks
  // of at most min(100, frames / 5) frames each.
  long full_frames = 0;
  for (int t = 0; t < m.frames; ++t) {
    bool full = true;
    for (int f = 0; f < m.bins; ++f) {
      if (out.at(t, f) == m.at(t, f)) full = false;
    }
    if (full) ++full_frames;
  }
  CHECK(full_frames <= 2 * (m.frames / 5));
}

TEST_CASE("specaugment skips warping short inputs") {
  Rng rng(11);
  FeatureMatrix m;
  m.frames = 100;  // < 2 * 80 + 2, warp must not run
  m.bins = 80;
  m.values.assign(static_cast<size_t>(m.frames) * m.bins, 1.0f);
  SpecAugmentConfig cfg;
  cfg.num_freq_masks = 0;
  cfg.num_time_masks = 0;
  FeatureMatrix out = apply_specaugment(m, cfg, rng);
  CHECK(out.values == m.values);
}

TEST_CASE("specaugment is deterministic per seed") {
  FeatureMatrix m;
  m.frames = 300;
  m.bins = 80;
  m.values.resize(static_cast<size_t>(m.frames) * m.bins);
  Rng data_rng(9);
  for (auto& v : m.values) v = static_cast<float>(data_rng.normal());
  SpecAugmentConfig cfg;
  Rng r1(42), r2(42), r3(43);
  FeatureMatrix a = apply_specaugment(m, cfg, r1);
  FeatureMatrix b = apply_specaugment(m, cfg, r2);
  FeatureMatrix c = apply_specaugment(m, cfg, r3);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}
