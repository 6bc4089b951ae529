// core/src/metrics/metrics.cpp

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

#include "cslid/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"

namespace cslid {

using json = nlohmann::json;

namespace {

int class_index(Language lang) {
  return lang == Language::kEnglish ? 0 : 1;
}

}  // namespace

ConfusionCounts confusion(const std::vector<ScoredTrial>& trials) {
  ConfusionCounts c;
  for (const auto& t : trials) {
    ++c.counts[class_index(t.label)][class_index(t.predicted)];
  }
  return c;
}

double balanced_accuracy(const std::vector<ScoredTrial>& trials) {
  ConfusionCounts c = confusion(trials);
  double recalls = 0.0;
  for (int k = 0; k < 2; ++k) {
    long total = c.counts[k][0] + c.counts[k][1];
    CSLID_CHECK(total > 0, ErrorKind::kArgument,
                std::string("balanced_accuracy: no trials labelled ") +
                    (k == 0 ? "en" : "zh"));
    recalls += static_cast<double>(c.counts[k][k]) / total;
  }
  return recalls / 2.0;
}

EerResult equal_error_rate(const std::vector<ScoredTrial>& trials) {
  std::vector<double> en_scores, zh_scores;
  for (const auto& t : trials) {
    (t.label == Language::kEnglish ? en_scores : zh_scores)
        .push_back(t.zh_score);
  }
  CSLID_CHECK(!en_scores.empty() && !zh_scores.empty(), ErrorKind::kArgument,
              "equal_error_rate: both classes must be present");

  std::vector<double> thresholds;
  thresholds.reserve(trials.size());
  for (const auto& t : trials) thresholds.push_back(t.zh_score);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  auto rates_at = [&](double thr) {
    long fa = 0, fr = 0;
    for (double s : en_scores) fa += s >= thr;
    for (double s : zh_scores) fr += s < thr;
    return std::pair<double, double>(
        static_cast<double>(fa) / en_scores.size(),
        static_cast<double>(fr) / zh_scores.size());
  };

  // FAR is non-increasing and FRR non-decreasing in the threshold, so walk
  // the sweep until their order flips.  Beyond the largest score FRR is 1
  // and FAR is 0, which closes the sweep.
  double prev_thr = thresholds.front();
  auto [prev_far, prev_frr] = rates_at(prev_thr);
  if (prev_far == prev_frr) return {prev_far, prev_thr};
  for (size_t i = 1; i <= thresholds.size(); ++i) {
    double thr = i < thresholds.size()
                     ? thresholds[i]
                     : std::nextafter(thresholds.back(),
                                      std::numeric_limits<double>::infinity());
    auto [far, frr] = rates_at(thr);
    if (far == frr) return {far, thr};
    if (prev_far > prev_frr && far < frr) {
      // Interpolate in rate space between the two bracketing thresholds.
      double d1 = prev_far - prev_frr;
      double d2 = frr - far;
      double u = d1 / (d1 + d2);
      double eer = prev_far + u * (far - prev_far);
      double t = prev_thr + u * (thr - prev_thr);
      return {eer, t};
    }
    prev_thr = thr;
    prev_far = far;
    prev_frr = frr;
  }
  // FAR starts below FRR at the smallest threshold: everything is accepted
  // as Mandarin already, the crossing sits below the sweep.
  return {prev_far, prev_thr};
}

EvalReport evaluate_trials(const std::vector<ScoredTrial>& trials) {
  EvalReport r;
  r.confusion = confusion(trials);
  r.num_trials = trials.size();
  long en_total = r.confusion.counts[0][0] + r.confusion.counts[0][1];
  long zh_total = r.confusion.counts[1][0] + r.confusion.counts[1][1];
  CSLID_CHECK(en_total > 0 && zh_total > 0, ErrorKind::kArgument,
              "evaluate_trials: both classes must be present");
  r.recall_en = static_cast<double>(r.confusion.counts[0][0]) / en_total;
  r.recall_zh = static_cast<double>(r.confusion.counts[1][1]) / zh_total;
  r.bac = (r.recall_en + r.recall_zh) / 2.0;
  EerResult eer = equal_error_rate(trials);
  r.eer = eer.eer;
  r.eer_threshold = eer.threshold;
  return r;
}

std::string serialize_trials(const std::vector<ScoredTrial>& trials) {
  std::string out;
  for (const auto& t : trials) {
    json j;
    j["id"] = t.id;
    j["label"] = language_name(t.label);
    j["predicted"] = language_name(t.predicted);
    j["zh_score"] = t.zh_score;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ScoredTrial> parse_trials(const std::string& text,
                                      const std::string& origin) {
  std::vector<ScoredTrial> trials;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = origin + ":" + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    CSLID_CHECK(!j.is_discarded(), ErrorKind::kParse, where + ": invalid JSON");
    ScoredTrial t;
    try {
      t.id = j.at("id").get<std::string>();
      t.label = parse_language(j.at("label").get<std::string>());
      t.predicted = parse_language(j.at("predicted").get<std::string>());
      t.zh_score = j.at("zh_score").get<double>();
    } catch (const json::exception& e) {
      throw_error(ErrorKind::kParse, where + ": " + e.what());
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

void save_trials(const std::string& path,
                 const std::vector<ScoredTrial>& trials) {
  write_file_text(path, serialize_trials(trials));
}

std::vector<ScoredTrial> load_trials(const std::string& path) {
  return parse_trials(read_file_text(path), path);
}

std::string serialize_report(const EvalReport& report) {
  json j;
  j["bac"] = report.bac;
  j["eer"] = report.eer;
  j["eer_threshold"] = report.eer_threshold;
  j["recall_en"] = report.recall_en;
  j["recall_zh"] = report.recall_zh;
  j["confusion"] = {
      {"en_as_en", report.confusion.counts[0][0]},
      {"en_as_zh", report.confusion.counts[0][1]},
      {"zh_as_en", report.confusion.counts[1][0]},
      {"zh_as_zh", report.confusion.counts[1][1]},
  };
  j["num_trials"] = report.num_trials;
  return j.dump(2) + "\n";
}

EvalReport parse_report(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  CSLID_CHECK(!j.is_discarded(), ErrorKind::kParse, "report: invalid JSON");
  EvalReport r;
  try {
    r.bac = j.at("bac").get<double>();
    r.eer = j.at("eer").get<double>();
    r.eer_threshold = j.at("eer_threshold").get<double>();
    r.recall_en = j.at("recall_en").get<double>();
    r.recall_zh = j.at("recall_zh").get<double>();
    const auto& c = j.at("confusion");
    r.confusion.counts[0][0] = c.at("en_as_en").get<long>();
    r.confusion.counts[0][1] = c.at("en_as_zh").get<long>();
    r.confusion.counts[1][0] = c.at("zh_as_en").get<long>();
    r.confusion.counts[1][1] = c.at("zh_as_zh").get<long>();
    r.num_trials = j.at("num_trials").get<size_t>();
  } catch (const json::exception& e) {
    throw_error(ErrorKind::kParse, std::string("report: ") + e.what());
  }
  return r;
}

void save_report(const std::string& path, const EvalReport& report) {
  write_file_text(path, serialize_report(report));
}

EvalReport load_report(const std::string& path) {
  return parse_report(read_file_text(path));
}

std::string format_report(const EvalReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "bac %.3f  eer %.3f @ %.3f", report.bac,
                report.eer, report.eer_threshold);
  return buf;
}

}  // namespace cslid
