// tools/synthgen.cpp

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

#include "synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"

namespace cslid {

namespace fs = std::filesystem;

namespace {

constexpr double kEnglishCenterHz = 500.0;
constexpr double kMandarinCenterHz = 3200.0;

double mel_of_hz(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double hz_of_mel(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

const std::vector<std::string>& english_words() {
  static const std::vector<std::string> words = {
      "alpha", "bravo", "charlie", "delta",
      "echo",  "foxtrot", "golf",  "hotel"};
  return words;
}

const std::vector<std::string>& mandarin_words() {
  static const std::vector<std::string> words = {
      "你好", "中国", "我们", "说话", "中华人民共和国", "人民"};
  return words;
}

std::vector<std::string> draw_transcript(Language language, Rng& rng) {
  const std::vector<std::string>& words =
      language == Language::kMandarin ? mandarin_words() : english_words();
  long count = language == Language::kMandarin ? rng.uniform_int(2, 4)
                                               : rng.uniform_int(3, 6);
  std::vector<std::string> transcript;
  transcript.reserve(count);
  for (long i = 0; i < count; ++i) {
    transcript.push_back(
        words[static_cast<size_t>(rng.uniform_int(0, words.size() - 1))]);
  }
  return transcript;
}

}  // namespace

AudioBuffer synthesize_utterance(Language language, double duration_s,
                                 int sample_rate_hz, Rng& rng) {
  CSLID_CHECK(duration_s > 0.0 && sample_rate_hz > 0, ErrorKind::kArgument,
              "utterance duration and rate must be positive");
  int n = static_cast<int>(std::lround(duration_s * sample_rate_hz));
  bool zh = language == Language::kMandarin;
  double center = zh ? kMandarinCenterHz : kEnglishCenterHz;
  double f0 = center * (1.0 + 0.1 * (2.0 * rng.uniform() - 1.0));
  double bw = zh ? 320.0 : 160.0;

  // Two-pole resonator: poles at r e^{+-j theta}.
  double theta = 2.0 * M_PI * f0 / sample_rate_hz;
  double r = std::exp(-M_PI * bw / sample_rate_hz);
  double a1 = -2.0 * r * std::cos(theta);
  double a2 = r * r;

  // Slow amplitude modulation, a crude syllable rhythm.
  double am_rate_hz = rng.uniform(2.0, 5.0);
  double am_phase = 2.0 * M_PI * rng.uniform();

  AudioBuffer audio;
  audio.sample_rate_hz = sample_rate_hz;
  audio.samples.resize(n);
  double y1 = 0.0, y2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = 2.0 * rng.uniform() - 1.0;
    double y = x - a1 * y1 - a2 * y2;
    y2 = y1;
    y1 = y;
    double env =
        1.0 + 0.3 * std::sin(2.0 * M_PI * am_rate_hz * i / sample_rate_hz +
                             am_phase);
    audio.samples[i] = static_cast<float>(y * env);
  }
  float peak = 0.0f;
  for (float v : audio.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0f) {
    float gain = 0.5f / peak;
    for (float& v : audio.samples) v *= gain;
  }
  return audio;
}

SynthesisResult generate_corpus(const SynthesisConfig& config,
                                const std::string& out_dir) {
  CSLID_CHECK(config.num_utterances > 0, ErrorKind::kArgument,
              "num_utterances must be positive");
  CSLID_CHECK(config.min_duration_s > 0.0 &&
                  config.max_duration_s >= config.min_duration_s,
              ErrorKind::kArgument, "bad duration range");
  CSLID_CHECK(0.0 <= config.zh_fraction && config.zh_fraction <= 1.0,
              ErrorKind::kArgument, "zh_fraction must lie in [0, 1]");
  fs::create_directories(fs::path(out_dir) / "wav");

  Rng rng(config.seed);
  SynthesisResult result;
  double cum_en = 0.0, cum_zh = 0.0;
  long count_en = 0, count_zh = 0;
  for (long i = 0; i < config.num_utterances; ++i) {
    Language lang;
    if (config.balance_duration) {
      lang = cum_en <= cum_zh ? Language::kEnglish : Language::kMandarin;
    } else {
      // Largest-remainder assignment: exact class proportions, no sampling
      // noise.  zh_fraction 0.5 alternates en, zh, en, zh.
      long before = static_cast<long>(std::floor(i * config.zh_fraction));
      long after = static_cast<long>(std::floor((i + 1) * config.zh_fraction));
      lang = after > before ? Language::kMandarin : Language::kEnglish;
    }
    double dur = rng.uniform(config.min_duration_s, config.max_duration_s);
    AudioBuffer audio =
        synthesize_utterance(lang, dur, config.sample_rate_hz, rng);

    char id[32];
    if (lang == Language::kMandarin) {
      std::snprintf(id, sizeof id, "zh-%04ld", count_zh++);
      cum_zh += audio.duration_s();
    } else {
      std::snprintf(id, sizeof id, "en-%04ld", count_en++);
      cum_en += audio.duration_s();
    }
    std::string path = (fs::path(out_dir) / "wav" / (std::string(id) + ".wav"))
                           .string();
    write_wav(path, audio);

    Utterance utt;
    utt.id = id;
    utt.audio_path = path;
    utt.offset_s = 0.0;
    utt.duration_s = audio.duration_s();
    utt.language = lang;
    utt.transcript = draw_transcript(lang, rng);
    utt.corpus_tag = "synth";
    result.manifest.utterances.push_back(std::move(utt));
  }

  result.manifest_path = (fs::path(out_dir) / "manifest.jsonl").string();
  result.en_lexicon_path = (fs::path(out_dir) / "lexicon_en.tsv").string();
  result.zh_lexicon_path = (fs::path(out_dir) / "lexicon_zh.tsv").string();
  save_manifest(result.manifest_path, result.manifest);
  write_file_text(result.en_lexicon_path, english_lexicon_text());
  write_file_text(result.zh_lexicon_path, mandarin_lexicon_text());
  return result;
}

std::string english_lexicon_text() {
  return
      "alpha\tAA L F AH\n"
      "bravo\tB R AA V OW\n"
      "charlie\tCH AA R L IY\n"
      "delta\tD EH L T AH\n"
      "echo\tEH K OW\n"
      "foxtrot\tF AA K S T R AA T\n"
      "golf\tG AA L F\n"
      "hotel\tHH OW T EH L\n";
}

std::string mandarin_lexicon_text() {
  // Multi-character entries first in spirit only; the tokenizer prefers the
  // longest match regardless of file order.  The seven-character entry
  // exercises greedy segmentation of long strings.
  return
      "你好\tn i3 h au3\n"
      "你\tn i3\n"
      "好\th au3\n"
      "中国\tzh ong1 g uo2\n"
      "中\tzh ong1\n"
      "国\tg uo2\n"
      "我们\tw o3 m en5\n"
      "我\tw o3\n"
      "们\tm en5\n"
      "说话\tsh uo1 h ua4\n"
      "说\tsh uo1\n"
      "话\th ua4\n"
      "中华人民共和国\tzh ong1 h ua2 r en2 m in2 g ong4 h e2 g uo2\n"
      "华\th ua2\n"
      "人民\tr en2 m in2\n"
      "人\tr en2\n"
      "民\tm in2\n"
      "共\tg ong4\n"
      "和\th e2\n";
}

double band_contrast(const FeatureMatrix& features, const FbankConfig& config) {
  CSLID_CHECK(features.frames > 0 && features.bins == config.num_bins,
              ErrorKind::kShape, "feature matrix does not match the config");
  // Triangular filter m is centered on mel point m+1 of num_bins + 2 points.
  double mel_lo = mel_of_hz(config.low_freq_hz);
  double mel_hi = mel_of_hz(config.high_freq_hz);
  double step = (mel_hi - mel_lo) / (config.num_bins + 1);
  double low_sum = 0.0, high_sum = 0.0;
  long low_n = 0, high_n = 0;
  for (int m = 0; m < config.num_bins; ++m) {
    double hz = hz_of_mel(mel_lo + (m + 1) * step);
    bool in_low = hz >= 0.6 * kEnglishCenterHz && hz <= 1.8 * kEnglishCenterHz;
    bool in_high =
        hz >= 0.75 * kMandarinCenterHz && hz <= 1.3 * kMandarinCenterHz;
    if (!in_low && !in_high) continue;
    double sum = 0.0;
    for (int t = 0; t < features.frames; ++t) sum += features.at(t, m);
    if (in_low) {
      low_sum += sum / features.frames;
      ++low_n;
    } else {
      high_sum += sum / features.frames;
      ++high_n;
    }
  }
  CSLID_CHECK(low_n > 0 && high_n > 0, ErrorKind::kShape,
              "filterbank does not cover both resonance bands");
  return high_sum / high_n - low_sum / low_n;
}

double best_threshold_bac(
    const std::vector<std::pair<double, Language>>& scored) {
  CSLID_CHECK(!scored.empty(), ErrorKind::kArgument, "no scores");
  long n_zh = 0, n_en = 0;
  for (const auto& [score, lang] : scored) {
    (lang == Language::kMandarin ? n_zh : n_en) += 1;
  }
  CSLID_CHECK(n_zh > 0 && n_en > 0, ErrorKind::kArgument,
              "both classes needed for balanced accuracy");
  std::vector<double> thresholds;
  thresholds.reserve(scored.size() + 1);
  for (const auto& [score, lang] : scored) thresholds.push_back(score);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.push_back(thresholds.back() + 1.0);
  double best = 0.0;
  for (double t : thresholds) {
    long zh_hit = 0, en_hit = 0;
    for (const auto& [score, lang] : scored) {
      if (lang == Language::kMandarin && score >= t) ++zh_hit;
      if (lang == Language::kEnglish && score < t) ++en_hit;
    }
    double bac = 0.5 * (static_cast<double>(zh_hit) / n_zh +
                        static_cast<double>(en_hit) / n_en);
    best = std::max(best, bac);
  }
  return best;
}

}  // namespace cslid
