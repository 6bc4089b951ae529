// core/src/corpus/manifest.cpp

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

#include "cslid/corpus/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"

namespace cslid {

using json = nlohmann::json;

const char* language_name(Language lang) {
  return lang == Language::kEnglish ? "en" : "zh";
}

Language parse_language(const std::string& name) {
  if (name == "en") return Language::kEnglish;
  if (name == "zh") return Language::kMandarin;
  throw_error(ErrorKind::kParse, "unknown language \"" + name + "\"");
}

double Manifest::total_duration_s() const {
  double sum = 0.0;
  for (const auto& u : utterances) sum += u.duration_s;
  return sum;
}

double Manifest::duration_s(Language lang) const {
  double sum = 0.0;
  for (const auto& u : utterances) {
    if (u.language == lang) sum += u.duration_s;
  }
  return sum;
}

size_t Manifest::count(Language lang) const {
  size_t n = 0;
  for (const auto& u : utterances) {
    if (u.language == lang) ++n;
  }
  return n;
}

namespace {

// "[tag]" and "<tag>" wrappers carry annotation markup, not lexical content.
std::string strip_brackets(const std::string& token) {
  if (token.size() >= 2) {
    char a = token.front(), b = token.back();
    if ((a == '[' && b == ']') || (a == '<' && b == '>')) {
      return token.substr(1, token.size() - 2);
    }
  }
  return token;
}

Utterance parse_utterance(const json& j, const std::string& where) {
  CSLID_CHECK(j.is_object(), ErrorKind::kParse, where + ": not a JSON object");
  Utterance u;
  try {
    u.id = j.at("id").get<std::string>();
    u.audio_path = j.at("audio_path").get<std::string>();
    u.offset_s = j.value("offset_s", 0.0);
    u.duration_s = j.at("duration_s").get<double>();
    u.language = parse_language(j.at("language").get<std::string>());
    if (j.contains("transcript")) {
      for (const auto& tok : j.at("transcript")) {
        std::string t = strip_brackets(tok.get<std::string>());
        if (!t.empty()) u.transcript.push_back(t);
      }
    }
    u.corpus_tag = j.value("corpus_tag", std::string());
  } catch (const json::exception& e) {
    throw_error(ErrorKind::kParse, where + ": " + e.what());
  }
  CSLID_CHECK(!u.id.empty(), ErrorKind::kParse, where + ": empty id");
  CSLID_CHECK(u.duration_s >= 0.0, ErrorKind::kParse,
              where + ": negative duration");
  return u;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& origin) {
  Manifest m;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::string where = origin + ":" + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    CSLID_CHECK(!j.is_discarded(), ErrorKind::kParse,
                where + ": invalid JSON");
    Utterance u = parse_utterance(j, where);
    CSLID_CHECK(seen.insert(u.id).second, ErrorKind::kIntegrity,
                where + ": duplicate utterance id \"" + u.id + "\"");
    m.utterances.push_back(std::move(u));
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  return parse_manifest(read_file_text(path), path);
}

std::string serialize_manifest(const Manifest& m) {
  std::string out;
  for (const auto& u : m.utterances) {
    json j;
    j["id"] = u.id;
    j["audio_path"] = u.audio_path;
    j["offset_s"] = u.offset_s;
    j["duration_s"] = u.duration_s;
    j["language"] = language_name(u.language);
    j["transcript"] = u.transcript;
    j["corpus_tag"] = u.corpus_tag;
    out += j.dump();  // nlohmann keeps keys sorted, so output is stable
    out += '\n';
  }
  return out;
}

void save_manifest(const std::string& path, const Manifest& m) {
  write_file_text(path, serialize_manifest(m));
}

HoldoutSplit split_holdout(const Manifest& m, double fraction, Rng& rng) {
  CSLID_CHECK(fraction > 0.0 && fraction < 1.0, ErrorKind::kArgument,
              "split_holdout: fraction must be in (0, 1)");
  HoldoutSplit split;
  for (Language lang : {Language::kEnglish, Language::kMandarin}) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < m.utterances.size(); ++i) {
      if (m.utterances[i].language == lang) idx.push_back(i);
    }
    if (idx.empty()) continue;
    size_t take = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(idx.size())));
    take = std::max<size_t>(take, 1);
    take = std::min(take, idx.size());
    rng.shuffle(idx);
    std::vector<bool> held(m.utterances.size(), false);
    for (size_t k = 0; k < take; ++k) held[idx[k]] = true;
    // Preserve manifest order within each side.
    for (size_t i : idx) {
      (held[i] ? split.holdout : split.train)
          .utterances.push_back(m.utterances[i]);
    }
  }
  // Restore the original interleaving across languages.
  std::unordered_map<std::string, size_t> pos;
  for (size_t i = 0; i < m.utterances.size(); ++i) pos[m.utterances[i].id] = i;
  auto by_original = [&pos](Manifest& part) {
    std::sort(part.utterances.begin(), part.utterances.end(),
              [&pos](const Utterance& a, const Utterance& b) {
                return pos.at(a.id) < pos.at(b.id);
              });
  };
  by_original(split.train);
  by_original(split.holdout);
  return split;
}

}  // namespace cslid
