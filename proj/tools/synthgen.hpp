// tools/synthgen.hpp

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

// Synthetic desk-scale corpus generator.  Two spectrally distinct
// "languages" are realized as white noise shaped by formant-like
// resonators: English sits in a low band, Mandarin in a high band.  The
// corpus ships with lexicons and phoneme transcripts so both the language
// classifier and the phoneme-supervised model can train on it.

#ifndef CSLID_TOOLS_SYNTHGEN_HPP_
#define CSLID_TOOLS_SYNTHGEN_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cslid/common/rng.hpp"
#include "cslid/corpus/manifest.hpp"
#include "cslid/dsp/audio.hpp"
#include "cslid/dsp/fbank.hpp"

namespace cslid {

struct SynthesisConfig {
  long num_utterances = 200;
  double min_duration_s = 1.6;
  double max_duration_s = 2.4;
  int sample_rate_hz = 16000;
  // false: strict en/zh alternation.  true: each new utterance goes to the
  // language with less accumulated duration, keeping the totals within one
  // utterance of each other.
  bool balance_duration = false;
  // Fraction of utterances assigned to Mandarin when not duration
  // balancing; 0.5 alternates evenly.  Used for imbalance experiments.
  double zh_fraction = 0.5;
  std::uint64_t seed = 17;
};

struct SynthesisResult {
  Manifest manifest;
  std::string manifest_path;
  std::string en_lexicon_path;
  std::string zh_lexicon_path;
};

// One shaped-noise utterance for the given language.
AudioBuffer synthesize_utterance(Language language, double duration_s,
                                 int sample_rate_hz, Rng& rng);

// Writes WAVs under <out_dir>/wav, the manifest to <out_dir>/manifest.jsonl,
// and the two lexicons next to it.  Deterministic for a fixed config.
SynthesisResult generate_corpus(const SynthesisConfig& config,
                                const std::string& out_dir);

// Built-in lexicon text, also written by generate_corpus.
std::string english_lexicon_text();
std::string mandarin_lexicon_text();

// Mean log energy in the high resonance band minus the low one.  Positive
// values indicate Mandarin-band energy.  Band edges are derived from the
// filterbank layout so they track the config.
double band_contrast(const FeatureMatrix& features,
                     const FbankConfig& config = FbankConfig());

// Best balanced accuracy over all thresholds of the form "predict Mandarin
// when score >= t".  The separability oracle for generated corpora.
double best_threshold_bac(
    const std::vector<std::pair<double, Language>>& scored);

}  // namespace cslid

#endif  // CSLID_TOOLS_SYNTHGEN_HPP_
