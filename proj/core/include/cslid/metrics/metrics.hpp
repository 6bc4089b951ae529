// core/include/cslid/metrics/metrics.hpp

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

#ifndef CSLID_METRICS_METRICS_HPP_
#define CSLID_METRICS_METRICS_HPP_

#include <string>
#include <vector>

#include "cslid/corpus/manifest.hpp"

namespace cslid {

// One scored utterance: the reference label, the predicted label, and the
// Mandarin posterior used as detection score.
struct ScoredTrial {
  std::string id;
  Language label = Language::kEnglish;
  Language predicted = Language::kEnglish;
  double zh_score = 0.0;
};

struct ConfusionCounts {
  // confusion[a][b] = trials with reference a predicted as b (0 = en, 1 = zh).
  long counts[2][2] = {{0, 0}, {0, 0}};
};

ConfusionCounts confusion(const std::vector<ScoredTrial>& trials);

// Mean of per-class recalls.  Both classes must be present.
double balanced_accuracy(const std::vector<ScoredTrial>& trials);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Equal error rate of the Mandarin detector.  FAR(t) counts English trials
// scoring >= t, FRR(t) counts Mandarin trials scoring < t.  Thresholds
// sweep the distinct observed scores; when no threshold makes the two rates
// equal, the crossing is interpolated linearly in the rates, which keeps
// the result invariant under monotone transforms of the scores.
EerResult equal_error_rate(const std::vector<ScoredTrial>& trials);

struct EvalReport {
  double bac = 0.0;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double recall_en = 0.0;
  double recall_zh = 0.0;
  ConfusionCounts confusion;
  size_t num_trials = 0;
};

EvalReport evaluate_trials(const std::vector<ScoredTrial>& trials);

// Trials serialize as JSONL, reports as a single sorted-key JSON object.
// Numbers are stored at full precision; rendering rounds to three decimals.
std::string serialize_trials(const std::vector<ScoredTrial>& trials);
std::vector<ScoredTrial> parse_trials(const std::string& text,
                                      const std::string& origin);
void save_trials(const std::string& path,
                 const std::vector<ScoredTrial>& trials);
std::vector<ScoredTrial> load_trials(const std::string& path);

std::string serialize_report(const EvalReport& report);
EvalReport parse_report(const std::string& text);
void save_report(const std::string& path, const EvalReport& report);
EvalReport load_report(const std::string& path);

// "bac 0.785  eer 0.333 @ 0.600" style one-line rendering.
std::string format_report(const EvalReport& report);

}  // namespace cslid

#endif  // CSLID_METRICS_METRICS_HPP_
