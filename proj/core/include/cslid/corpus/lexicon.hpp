// core/include/cslid/corpus/lexicon.hpp

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

#ifndef CSLID_CORPUS_LEXICON_HPP_
#define CSLID_CORPUS_LEXICON_HPP_

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cslid/corpus/manifest.hpp"

namespace cslid {

// word -> phoneme sequence for one language.
struct Lexicon {
  Language language = Language::kEnglish;
  std::map<std::string, std::vector<std::string>> entries;
};

// Parses tab-separated "word<TAB>ph ph ph" lines.  Mandarin phonemes get a
// "_cn" suffix appended unless already present, keeping the two phoneme
// inventories disjoint.  Parse failures report the 1-based line number.
Lexicon load_lexicon(const std::string& path, Language language);
Lexicon parse_lexicon(const std::string& text, Language language,
                      const std::string& origin);

// Phoneme vocabulary shared across languages.  Index 0 is the CTC blank,
// index 1 the unknown symbol, and phonemes follow in sorted order.
struct Vocabulary {
  std::vector<std::string> symbols;
  std::unordered_map<std::string, int> index;

  static constexpr int kBlank = 0;
  static constexpr int kUnk = 1;

  int size() const { return static_cast<int>(symbols.size()); }
  int lookup(const std::string& symbol) const;  // kUnk when absent
};

Vocabulary build_vocab(const std::vector<Lexicon>& lexicons);

// Phoneme ids for one transcript token sequence.
struct TokenSequence {
  std::vector<int> ids;
};

// Maps transcript words to phoneme ids.  English words are looked up
// directly.  Mandarin strings longer than four codepoints are segmented by
// greedy longest-match against the lexicon before lookup; characters that
// match nothing emit the unknown id and advance one codepoint.
TokenSequence tokenize_transcript(const std::vector<std::string>& words,
                                  Language language, const Lexicon& lexicon,
                                  const Vocabulary& vocab);

}  // namespace cslid

#endif  // CSLID_CORPUS_LEXICON_HPP_
