// core/include/cslid/sampler/batching.hpp

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

#ifndef CSLID_SAMPLER_BATCHING_HPP_
#define CSLID_SAMPLER_BATCHING_HPP_

#include <vector>

#include "cslid/common/rng.hpp"
#include "cslid/corpus/lexicon.hpp"
#include "cslid/corpus/manifest.hpp"
#include "cslid/dsp/fbank.hpp"

namespace cslid {

// Training batch after feature extraction.  token_targets is either empty or
// aligned one-to-one with features.
struct Batch {
  std::vector<FeatureMatrix> features;
  std::vector<Language> labels;
  std::vector<TokenSequence> token_targets;
  double total_duration_s = 0.0;
};

// Batch at the manifest level; features attach later.
struct UtteranceBatch {
  std::vector<Utterance> utterances;
  double total_duration_s = 0.0;
};

// One epoch of batches in consumption order.
struct BatchStream {
  std::vector<UtteranceBatch> batches;
  // Set when a balanced stream fell back to plain batching because the
  // manifest held a single language.
  bool unbalanced_fallback = false;

  size_t utterance_count() const;
  double total_duration_s() const;
};

// Alternates English and Mandarin draws from per-language shuffled pools so
// every batch's class counts differ by at most one.  A batch closes when the
// next utterance would push it past max_batch_duration_s (an oversized
// utterance still forms a singleton batch).  The epoch ends when the pool the
// alternation needs next is empty.
BatchStream balanced_language_batches(const Manifest& manifest,
                                      double max_batch_duration_s, Rng& rng);

// Draws from whichever corpus has the smaller cumulative drawn duration
// (ties favor `a`), keeping the two within one utterance of each other.  The
// epoch ends when the corpus needed next is exhausted, i.e. after one pass
// over the smaller corpus.
BatchStream duration_balanced_mix(const Manifest& a, const Manifest& b,
                                  double max_batch_duration_s, Rng& rng);

// Plain shuffled batches with the same duration-capped closing rule.
BatchStream shuffled_batches(const Manifest& manifest,
                             double max_batch_duration_s, Rng& rng);

}  // namespace cslid

#endif  // CSLID_SAMPLER_BATCHING_HPP_
