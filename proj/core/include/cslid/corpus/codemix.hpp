// core/include/cslid/corpus/codemix.hpp

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

#ifndef CSLID_CORPUS_CODEMIX_HPP_
#define CSLID_CORPUS_CODEMIX_HPP_

#include "cslid/common/rng.hpp"
#include "cslid/corpus/manifest.hpp"

namespace cslid {

struct CodemixConfig {
  double min_segment_s = 1.0;
  double max_segment_s = 5.0;
};

// Builds silver code-switched data from monolingual utterances: each
// utterance is cut into segments of random length, the segments are pooled
// per language and shuffled, then interleaved by always drawing from the
// language whose cumulative emitted duration is behind.  Emission stops as
// soon as the pool that is needed next is empty, which bounds the final
// duration imbalance by one maximum segment length.
//
// Output utterances are windows into the source audio (offset_s points into
// the original file) tagged "codemix".  Transcripts carry over to segments
// only when the source utterance had none; word-level timing is unknown, so
// cut segments drop the transcript.
Manifest synthesize_codemix(const Manifest& source, const CodemixConfig& cfg,
                            Rng& rng);

// Replicates every utterance of the given language `factor` times.  The
// first copy keeps its id, later copies get "#dupN" suffixes and are placed
// adjacent to the original.  The summed duration of the class scales by
// exactly `factor`.
Manifest upsample_class(const Manifest& m, Language language, int factor);

}  // namespace cslid

#endif  // CSLID_CORPUS_CODEMIX_HPP_
