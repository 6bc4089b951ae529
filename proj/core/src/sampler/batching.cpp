// core/src/sampler/batching.cpp

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

#include "cslid/sampler/batching.hpp"

#include <utility>

#include "cslid/common/error.hpp"

namespace cslid {

size_t BatchStream::utterance_count() const {
  size_t n = 0;
  for (const UtteranceBatch& b : batches) n += b.utterances.size();
  return n;
}

double BatchStream::total_duration_s() const {
  double d = 0.0;
  for (const UtteranceBatch& b : batches) d += b.total_duration_s;
  return d;
}

namespace {

// Accumulates utterances into duration-capped batches.  A non-empty batch
// closes before an utterance that would push it past the cap; an empty batch
// accepts anything, so oversized utterances become singletons.
class BatchBuilder {
 public:
  BatchBuilder(double max_duration_s, std::vector<UtteranceBatch>* out)
      : max_duration_s_(max_duration_s), out_(out) {}

  void add(Utterance utt) {
    if (!current_.utterances.empty() &&
        current_.total_duration_s + utt.duration_s > max_duration_s_) {
      flush();
    }
    current_.total_duration_s += utt.duration_s;
    current_.utterances.push_back(std::move(utt));
  }

  void flush() {
    if (current_.utterances.empty()) return;
    out_->push_back(std::move(current_));
    current_ = UtteranceBatch{};
  }

 private:
  double max_duration_s_;
  std::vector<UtteranceBatch>* out_;
  UtteranceBatch current_;
};

}  // namespace

BatchStream shuffled_batches(const Manifest& manifest,
                             double max_batch_duration_s, Rng& rng) {
  CSLID_CHECK(max_batch_duration_s > 0.0, ErrorKind::kArgument,
              "max batch duration must be positive");
  CSLID_CHECK(!manifest.utterances.empty(), ErrorKind::kArgument,
              "empty manifest");
  std::vector<Utterance> pool = manifest.utterances;
  rng.shuffle(pool);
  BatchStream stream;
  BatchBuilder builder(max_batch_duration_s, &stream.batches);
  for (Utterance& utt : pool) builder.add(std::move(utt));
  builder.flush();
  return stream;
}

BatchStream balanced_language_batches(const Manifest& manifest,
                                      double max_batch_duration_s, Rng& rng) {
  CSLID_CHECK(max_batch_duration_s > 0.0, ErrorKind::kArgument,
              "max batch duration must be positive");
  CSLID_CHECK(!manifest.utterances.empty(), ErrorKind::kArgument,
              "empty manifest");
  std::vector<Utterance> en, zh;
  for (const Utterance& utt : manifest.utterances) {
    (utt.language == Language::kEnglish ? en : zh).push_back(utt);
  }
  if (en.empty() || zh.empty()) {
    BatchStream stream = shuffled_batches(manifest, max_batch_duration_s, rng);
    stream.unbalanced_fallback = true;
    return stream;
  }
  rng.shuffle(en);
  rng.shuffle(zh);

  // Strict global alternation starting with English.  Every batch is a
  // contiguous window of the alternating sequence, so per-batch class counts
  // differ by at most one.
  BatchStream stream;
  BatchBuilder builder(max_batch_duration_s, &stream.batches);
  size_t ie = 0, iz = 0;
  bool want_en = true;
  for (;;) {
    std::vector<Utterance>& pool = want_en ? en : zh;
    size_t& i = want_en ? ie : iz;
    if (i >= pool.size()) break;
    builder.add(std::move(pool[i++]));
    want_en = !want_en;
  }
  builder.flush();
  return stream;
}

BatchStream duration_balanced_mix(const Manifest& a, const Manifest& b,
                                  double max_batch_duration_s, Rng& rng) {
  CSLID_CHECK(max_batch_duration_s > 0.0, ErrorKind::kArgument,
              "max batch duration must be positive");
  CSLID_CHECK(!a.utterances.empty() && !b.utterances.empty(),
              ErrorKind::kArgument, "both corpora must be non-empty");
  std::vector<Utterance> pa = a.utterances;
  std::vector<Utterance> pb = b.utterances;
  rng.shuffle(pa);
  rng.shuffle(pb);

  // Always draw from the side that is behind in cumulative duration, so the
  // two never diverge by more than one utterance.  Stopping when the needed
  // side runs dry finishes exactly one pass over the smaller corpus.
  BatchStream stream;
  BatchBuilder builder(max_batch_duration_s, &stream.batches);
  size_t ia = 0, ib = 0;
  double cum_a = 0.0, cum_b = 0.0;
  for (;;) {
    bool from_a = cum_a <= cum_b;
    std::vector<Utterance>& pool = from_a ? pa : pb;
    size_t& i = from_a ? ia : ib;
    double& cum = from_a ? cum_a : cum_b;
    if (i >= pool.size()) break;
    cum += pool[i].duration_s;
    builder.add(std::move(pool[i++]));
  }
  builder.flush();
  return stream;
}

}  // namespace cslid
