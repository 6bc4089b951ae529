// core/src/corpus/lexicon.cpp

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

#include "cslid/corpus/lexicon.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"
#include "cslid/common/utf8.hpp"

namespace cslid {

namespace {

constexpr size_t kDirectLookupMaxCodepoints = 4;

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Lexicon parse_lexicon(const std::string& text, Language language,
                      const std::string& origin) {
  Lexicon lex;
  lex.language = language;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = origin + ":" + std::to_string(line_no);
    size_t tab = line.find('\t');
    CSLID_CHECK(tab != std::string::npos, ErrorKind::kParse,
                where + ": expected word<TAB>phonemes");
    std::string word = line.substr(0, tab);
    CSLID_CHECK(!word.empty(), ErrorKind::kParse, where + ": empty word");
    std::vector<std::string> phones = split_ws(line.substr(tab + 1));
    CSLID_CHECK(!phones.empty(), ErrorKind::kParse,
                where + ": no phonemes for \"" + word + "\"");
    if (language == Language::kMandarin) {
      for (auto& p : phones) {
        if (p.size() < 3 || p.compare(p.size() - 3, 3, "_cn") != 0) {
          p += "_cn";
        }
      }
    }
    lex.entries[word] = std::move(phones);
  }
  return lex;
}

Lexicon load_lexicon(const std::string& path, Language language) {
  return parse_lexicon(read_file_text(path), language, path);
}

int Vocabulary::lookup(const std::string& symbol) const {
  auto it = index.find(symbol);
  return it == index.end() ? kUnk : it->second;
}

Vocabulary build_vocab(const std::vector<Lexicon>& lexicons) {
  std::set<std::string> phones;
  for (const auto& lex : lexicons) {
    for (const auto& [word, seq] : lex.entries) {
      phones.insert(seq.begin(), seq.end());
    }
  }
  Vocabulary v;
  v.symbols.push_back("<blank>");
  v.symbols.push_back("<unk>");
  for (const auto& p : phones) v.symbols.push_back(p);
  for (size_t i = 0; i < v.symbols.size(); ++i) {
    v.index[v.symbols[i]] = static_cast<int>(i);
  }
  return v;
}

namespace {

void append_word(const std::string& word, const Lexicon& lexicon,
                 const Vocabulary& vocab, std::vector<int>& out) {
  auto it = lexicon.entries.find(word);
  if (it == lexicon.entries.end()) {
    out.push_back(Vocabulary::kUnk);
    return;
  }
  for (const auto& p : it->second) out.push_back(vocab.lookup(p));
}

// Greedy longest-match segmentation over codepoints.  A position that
// starts no lexicon entry consumes one codepoint as unknown.
void append_segmented(const std::string& word, const Lexicon& lexicon,
                      const Vocabulary& vocab, std::vector<int>& out) {
  std::vector<std::string> cps = utf8_codepoints(word);
  size_t max_entry_cps = 1;
  for (const auto& [w, seq] : lexicon.entries) {
    max_entry_cps = std::max(max_entry_cps, utf8_length(w));
  }
  size_t i = 0;
  while (i < cps.size()) {
    size_t longest = 0;
    size_t limit = std::min(max_entry_cps, cps.size() - i);
    std::string candidate;
    std::string best;
    for (size_t len = 1; len <= limit; ++len) {
      candidate += cps[i + len - 1];
      if (lexicon.entries.count(candidate)) {
        longest = len;
        best = candidate;
      }
    }
    if (longest == 0) {
      out.push_back(Vocabulary::kUnk);
      i += 1;
    } else {
      append_word(best, lexicon, vocab, out);
      i += longest;
    }
  }
}

}  // namespace

TokenSequence tokenize_transcript(const std::vector<std::string>& words,
                                  Language language, const Lexicon& lexicon,
                                  const Vocabulary& vocab) {
  TokenSequence seq;
  for (const auto& word : words) {
    if (language == Language::kMandarin &&
        utf8_length(word) > kDirectLookupMaxCodepoints) {
      append_segmented(word, lexicon, vocab, seq.ids);
    } else {
      append_word(word, lexicon, vocab, seq.ids);
    }
  }
  return seq;
}

}  // namespace cslid
