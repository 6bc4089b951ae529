// tests/test_corpus.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cslid/common/error.hpp"
#include "cslid/common/rng.hpp"
#include "cslid/corpus/codemix.hpp"
#include "cslid/corpus/lexicon.hpp"
#include "cslid/corpus/manifest.hpp"
#include "testing.hpp"

using namespace cslid;

namespace {

Utterance utt(const std::string& id, Language lang, double dur,
              std::vector<std::string> words = {}) {
  Utterance u;
  u.id = id;
  u.audio_path = "/data/" + id + ".wav";
  u.duration_s = dur;
  u.language = lang;
  u.transcript = std::move(words);
  u.corpus_tag = "test";
  return u;
}

Manifest make_manifest(int n_en, int n_zh, double dur) {
  Manifest m;
  for (int i = 0; i < n_en; ++i) {
    m.utterances.push_back(
        utt("en-" + std::to_string(i), Language::kEnglish, dur));
  }
  for (int i = 0; i < n_zh; ++i) {
    m.utterances.push_back(
        utt("zh-" + std::to_string(i), Language::kMandarin, dur));
  }
  return m;
}

}  // namespace

TEST_CASE("manifest jsonl round trip") {
  testing::TempDir tmp;
  Manifest m = make_manifest(2, 3, 1.5);
  m.utterances[0].transcript = {"hello", "world"};
  m.utterances[2].transcript = {"你好"};
  save_manifest(tmp.file("m.jsonl"), m);
  Manifest r = load_manifest(tmp.file("m.jsonl"));
  REQUIRE(r.utterances.size() == 5);
  CHECK(r.utterances[0].id == "en-0");
  CHECK(r.utterances[0].transcript == std::vector<std::string>{"hello",
                                                               "world"});
  CHECK(r.utterances[2].language == Language::kMandarin);
  CHECK(r.utterances[2].transcript == std::vector<std::string>{"你好"});
  CHECK(r.duration_s(Language::kEnglish) == doctest::Approx(3.0));
  CHECK(r.duration_s(Language::kMandarin) == doctest::Approx(4.5));
}

TEST_CASE("manifest serialization is key sorted and stable") {
  Manifest m = make_manifest(1, 1, 2.0);
  std::string a = serialize_manifest(m);
  std::string b = serialize_manifest(m);
  CHECK(a == b);
  // Keys appear in sorted order within each line.
  size_t audio = a.find("\"audio_path\"");
  size_t tag = a.find("\"corpus_tag\"");
  size_t id = a.find("\"id\"");
  CHECK(audio < tag);
  CHECK(tag < id);
}

TEST_CASE("manifest rejects duplicate ids") {
  testing::TempDir tmp;
  Manifest m;
  m.utterances.push_back(utt("dup", Language::kEnglish, 1.0));
  m.utterances.push_back(utt("dup", Language::kMandarin, 1.0));
  save_manifest(tmp.file("m.jsonl"), m);
  CHECK_THROWS_AS(load_manifest(tmp.file("m.jsonl")), Error);
}

TEST_CASE("manifest strips bracketed tags from transcripts") {
  testing::TempDir tmp;
  std::string line =
      R"({"audio_path":"a.wav","duration_s":1.0,"id":"u1",)"
      R"("language":"en","offset_s":0.0,)"
      R"("transcript":["[noise]","hello","<unk>","world"]})";
  {
    std::ofstream out(tmp.file("m.jsonl"));
    out << line << "\n";
  }
  Manifest m = load_manifest(tmp.file("m.jsonl"));
  REQUIRE(m.utterances.size() == 1);
  CHECK(m.utterances[0].transcript ==
        std::vector<std::string>{"hello", "world"});
}

TEST_CASE("lexicon parse and mandarin suffix") {
  Lexicon en = parse_lexicon("hello\tHH EH L OW\nworld\tW ER L D\n",
                             Language::kEnglish, "test");
  CHECK(en.entries.at("hello") ==
        std::vector<std::string>{"HH", "EH", "L", "OW"});
  Lexicon zh =
      parse_lexicon("你好\tn i3 h au3\n", Language::kMandarin, "test");
  CHECK(zh.entries.at("你好") ==
        std::vector<std::string>{"n_cn", "i3_cn", "h_cn", "au3_cn"});
}

TEST_CASE("vocabulary layout and lookup") {
  Lexicon en = parse_lexicon("a\tAA\nb\tB AA\n", Language::kEnglish, "t");
  Lexicon zh = parse_lexicon("你\tni3\n", Language::kMandarin, "t");
  Vocabulary v = build_vocab({en, zh});
  CHECK(v.symbols[0] == "<blank>");
  CHECK(v.symbols[1] == "<unk>");
  CHECK(v.size() == 2 + 3);  // AA, B, ni3_cn
  CHECK(v.lookup("AA") >= 2);
  CHECK(v.lookup("nope") == Vocabulary::kUnk);
}

TEST_CASE("tokenize english and unknown words") {
  Lexicon en = parse_lexicon("hello\tHH EH L OW\n", Language::kEnglish, "t");
  Vocabulary v = build_vocab({en});
  TokenSequence seq = tokenize_transcript({"hello", "mystery"},
                                          Language::kEnglish, en, v);
  REQUIRE(seq.ids.size() == 5);
  CHECK(seq.ids[4] == Vocabulary::kUnk);
  for (int i = 0; i < 4; ++i) CHECK(seq.ids[i] >= 2);
}

TEST_CASE("tokenize mandarin long string by greedy longest match") {
  Lexicon zh = parse_lexicon(
      "你好\tn i3 h au3\n你\tn i3\n好\th au3\n中国\tzh ong1 g uo2\n"
      "中\tzh ong1\n国\tg uo2\n",
      Language::kMandarin, "t");
  Vocabulary v = build_vocab({zh});
  // Five codepoints force segmentation; longest entries win.
  TokenSequence seq =
      tokenize_transcript({"你好中国你"}, Language::kMandarin, zh, v);
  TokenSequence expected;
  for (const std::string& word : {"你好", "中国", "你"}) {
    for (const std::string& ph : zh.entries.at(word)) {
      expected.ids.push_back(v.lookup(ph));
    }
  }
  CHECK(seq.ids == expected.ids);
}

TEST_CASE("codemix segments cover sources and balance languages") {
  Manifest m = make_manifest(6, 6, 8.0);
  Rng rng(13);
  CodemixConfig cfg;
  Manifest mixed = synthesize_codemix(m, cfg, rng);
  REQUIRE(!mixed.utterances.empty());

  double total_en = 0.0, total_zh = 0.0;
  std::set<std::string> ids;
  for (const Utterance& u : mixed.utterances) {
    CHECK(u.corpus_tag == "codemix");
    CHECK(u.id.rfind("mix-", 0) == 0);
    CHECK(ids.insert(u.id).second);
    CHECK(u.duration_s >= cfg.min_segment_s - 1e-9);
    CHECK(u.duration_s <= cfg.max_segment_s + 1e-9);
    (u.language == Language::kMandarin ? total_zh : total_en) += u.duration_s;
  }
  // Total emitted duration never exceeds the source material.
  CHECK(total_en <= 48.0 + 1e-6);
  CHECK(total_zh <= 48.0 + 1e-6);
  // The interleaver keeps languages within one maximum segment.
  CHECK(std::abs(total_en - total_zh) <= cfg.max_segment_s + 1e-6);
}

TEST_CASE("codemix is deterministic per seed") {
  Manifest m = make_manifest(4, 4, 6.0);
  CodemixConfig cfg;
  Rng r1(3), r2(3);
  std::string a = serialize_manifest(synthesize_codemix(m, cfg, r1));
  std::string b = serialize_manifest(synthesize_codemix(m, cfg, r2));
  CHECK(a == b);
}

TEST_CASE("upsample duplicates a class with dup ids") {
  Manifest m = make_manifest(2, 2, 3.0);
  Manifest up = upsample_class(m, Language::kMandarin, 3);
  CHECK(up.duration_s(Language::kMandarin) == doctest::Approx(18.0));
  CHECK(up.duration_s(Language::kEnglish) == doctest::Approx(6.0));
  std::set<std::string> ids;
  long dups = 0;
  for (const Utterance& u : up.utterances) {
    CHECK(ids.insert(u.id).second);
    if (u.id.find("#dup") != std::string::npos) ++dups;
  }
  CHECK(dups == 4);
  CHECK(upsample_class(m, Language::kMandarin, 1).utterances.size() == 4);
}

TEST_CASE("holdout split is seeded and keeps both sides non-empty") {
  Manifest m = make_manifest(40, 40, 2.0);
  Rng r1(5), r2(5), r3(6);
  HoldoutSplit a = split_holdout(m, 0.1, r1);
  HoldoutSplit b = split_holdout(m, 0.1, r2);
  HoldoutSplit c = split_holdout(m, 0.1, r3);
  CHECK(a.holdout.utterances.size() == b.holdout.utterances.size());
  CHECK(serialize_manifest(a.holdout) == serialize_manifest(b.holdout));
  CHECK(serialize_manifest(a.holdout) != serialize_manifest(c.holdout));
  CHECK(a.train.utterances.size() + a.holdout.utterances.size() == 80);
  // Both languages appear in the holdout.
  CHECK(a.holdout.duration_s(Language::kEnglish) > 0.0);
  CHECK(a.holdout.duration_s(Language::kMandarin) > 0.0);
}
