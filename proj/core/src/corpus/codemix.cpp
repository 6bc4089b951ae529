// core/src/corpus/codemix.cpp

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

#include "cslid/corpus/codemix.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "cslid/common/error.hpp"

namespace cslid {

namespace {

// One cut window into a source utterance.
struct Segment {
  const Utterance* source = nullptr;
  double offset_s = 0.0;    // relative to the source utterance start
  double duration_s = 0.0;
  bool whole = false;       // covers the entire source utterance
};

std::vector<Segment> cut_utterance(const Utterance& u,
                                   const CodemixConfig& cfg, Rng& rng) {
  std::vector<Segment> segs;
  if (u.duration_s <= cfg.max_segment_s) {
    segs.push_back({&u, 0.0, u.duration_s, true});
    return segs;
  }
  double pos = 0.0;
  while (pos < u.duration_s) {
    double remaining = u.duration_s - pos;
    if (remaining <= cfg.max_segment_s) {
      // Keep the tail only if it reaches the minimum length.
      if (remaining >= cfg.min_segment_s) {
        segs.push_back({&u, pos, remaining, false});
      }
      break;
    }
    double len = rng.uniform(cfg.min_segment_s, cfg.max_segment_s);
    segs.push_back({&u, pos, len, false});
    pos += len;
  }
  return segs;
}

}  // namespace

Manifest synthesize_codemix(const Manifest& source, const CodemixConfig& cfg,
                            Rng& rng) {
  CSLID_CHECK(cfg.min_segment_s > 0.0 && cfg.max_segment_s >= cfg.min_segment_s,
              ErrorKind::kConfig, "codemix: bad segment length bounds");

  std::vector<Segment> pool_en, pool_zh;
  for (const auto& u : source.utterances) {
    auto segs = cut_utterance(u, cfg, rng);
    auto& pool = u.language == Language::kEnglish ? pool_en : pool_zh;
    pool.insert(pool.end(), segs.begin(), segs.end());
  }
  rng.shuffle(pool_en);
  rng.shuffle(pool_zh);

  Manifest out;
  double dur_en = 0.0, dur_zh = 0.0;
  size_t i_en = 0, i_zh = 0, serial = 0;
  while (true) {
    // Draw from the language that has emitted less so far (ties go to en).
    bool want_en = dur_en <= dur_zh;
    size_t& i = want_en ? i_en : i_zh;
    const auto& pool = want_en ? pool_en : pool_zh;
    if (i >= pool.size()) break;  // the needed pool is exhausted
    const Segment& s = pool[i++];

    Utterance u;
    u.id = "mix-" + std::to_string(serial++) + "-" + s.source->id;
    u.audio_path = s.source->audio_path;
    u.offset_s = s.source->offset_s + s.offset_s;
    u.duration_s = s.duration_s;
    u.language = s.source->language;
    if (s.whole) u.transcript = s.source->transcript;
    u.corpus_tag = "codemix";
    out.utterances.push_back(std::move(u));

    (want_en ? dur_en : dur_zh) += s.duration_s;
  }
  return out;
}

Manifest upsample_class(const Manifest& m, Language language, int factor) {
  CSLID_CHECK(factor >= 1, ErrorKind::kArgument,
              "upsample_class: factor must be at least 1");
  Manifest out;
  for (const auto& u : m.utterances) {
    out.utterances.push_back(u);
    if (u.language != language) continue;
    for (int k = 1; k < factor; ++k) {
      Utterance dup = u;
      dup.id = u.id + "#dup" + std::to_string(k);
      out.utterances.push_back(std::move(dup));
    }
  }
  return out;
}

}  // namespace cslid
