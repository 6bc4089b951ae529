// core/include/cslid/corpus/manifest.hpp

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

#ifndef CSLID_CORPUS_MANIFEST_HPP_
#define CSLID_CORPUS_MANIFEST_HPP_

#include <string>
#include <vector>

#include "cslid/common/rng.hpp"

namespace cslid {

enum class Language { kEnglish, kMandarin };

const char* language_name(Language lang);          // "en" / "zh"
Language parse_language(const std::string& name);  // throws kParse otherwise

struct Utterance {
  std::string id;
  std::string audio_path;
  double offset_s = 0.0;
  double duration_s = 0.0;
  Language language = Language::kEnglish;
  std::vector<std::string> transcript;
  std::string corpus_tag;
};

struct Manifest {
  std::vector<Utterance> utterances;

  double total_duration_s() const;
  double duration_s(Language lang) const;
  size_t count(Language lang) const;
};

// Reads one JSON object per line.  Annotation tags wrapped in [] or <> are
// stripped down to their inner text on load.  Parse failures report the
// 1-based line number; duplicate ids raise kIntegrity.
Manifest load_manifest(const std::string& path);
Manifest parse_manifest(const std::string& text, const std::string& origin);

// Writes JSONL with keys in sorted order, one utterance per line.
std::string serialize_manifest(const Manifest& m);
void save_manifest(const std::string& path, const Manifest& m);

// Splits off a per-language holdout of ceil(fraction * n), at least one
// utterance per represented language.  Selection is seeded and stable.
struct HoldoutSplit {
  Manifest train;
  Manifest holdout;
};
HoldoutSplit split_holdout(const Manifest& m, double fraction, Rng& rng);

}  // namespace cslid

#endif  // CSLID_CORPUS_MANIFEST_HPP_
