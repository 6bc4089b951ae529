// core/src/sampler/schedule.cpp

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

#include "cslid/sampler/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cslid/common/error.hpp"
#include "cslid/corpus/codemix.hpp"

namespace cslid {

CorpusStats CorpusStats::of(const Manifest& manifest) {
  CorpusStats stats;
  stats.zh_hours = manifest.duration_s(Language::kMandarin) / 3600.0;
  stats.en_hours = manifest.duration_s(Language::kEnglish) / 3600.0;
  return stats;
}

double MixSpec::ood_id_ratio() const {
  return id_total() > 0.0 ? ood_total() / id_total() : 0.0;
}

double MixSpec::id_zh_en_ratio() const {
  return id_en > 0.0 ? id_zh / id_en : 0.0;
}

double MixSpec::ood_zh_en_ratio() const {
  return ood_en > 0.0 ? ood_zh / ood_en : 0.0;
}

double MixSpec::zh_en_ratio() const {
  return en_total() > 0.0 ? zh_total() / en_total() : 0.0;
}

std::vector<ScheduleStage> build_gft_schedule(const CorpusStats& in_domain,
                                              const CorpusStats& out_domain,
                                              const std::vector<double>& ratios,
                                              const std::vector<long>& factors,
                                              long epochs_per_stage) {
  CSLID_CHECK(!ratios.empty(), ErrorKind::kSchedule, "empty ratio list");
  CSLID_CHECK(epochs_per_stage >= 1, ErrorKind::kSchedule,
              "epochs_per_stage must be positive");
  CSLID_CHECK(factors.size() == 1 || factors.size() == ratios.size(),
              ErrorKind::kSchedule,
              "factor list must match the ratio list or hold one value");
  for (size_t k = 0; k < ratios.size(); ++k) {
    CSLID_CHECK(ratios[k] >= 0.0, ErrorKind::kSchedule, "negative ratio");
    CSLID_CHECK(k == 0 || ratios[k] <= ratios[k - 1], ErrorKind::kSchedule,
                "ratio sequence must be non-increasing");
  }
  CSLID_CHECK(ratios.back() == 0.0, ErrorKind::kSchedule,
              "final stage must have ratio 0");
  for (long f : factors) {
    CSLID_CHECK(f >= 1, ErrorKind::kSchedule,
                "up-sampling factors must be positive");
  }

  std::vector<ScheduleStage> stages;
  stages.reserve(ratios.size());
  double pool = out_domain.total_hours();
  for (size_t k = 0; k < ratios.size(); ++k) {
    ScheduleStage stage;
    stage.stage_index = static_cast<int>(k) + 1;
    stage.upsample_zh = factors.size() == 1 ? factors[0] : factors[k];
    stage.target_ood_id_ratio = ratios[k];
    double id_total = in_domain.zh_hours * static_cast<double>(stage.upsample_zh) +
                      in_domain.en_hours;
    double wanted = ratios[k] * id_total;
    stage.ood_fraction = pool > 0.0 ? std::min(1.0, wanted / pool) : 0.0;
    stage.epochs = epochs_per_stage;
    stages.push_back(stage);
  }
  return stages;
}

MixSpec compute_stage_mix(const ScheduleStage& stage,
                          const CorpusStats& in_domain,
                          const CorpusStats& out_domain) {
  CSLID_CHECK(stage.upsample_zh >= 1, ErrorKind::kSchedule,
              "up-sampling factor must be positive");
  CSLID_CHECK(stage.ood_fraction >= 0.0, ErrorKind::kSchedule,
              "negative pool fraction");
  MixSpec mix;
  mix.stage_index = stage.stage_index;
  mix.id_zh = in_domain.zh_hours * static_cast<double>(stage.upsample_zh);
  mix.id_en = in_domain.en_hours;
  double fraction = std::min(1.0, stage.ood_fraction);
  mix.ood_zh = out_domain.zh_hours * fraction;
  mix.ood_en = out_domain.en_hours * fraction;
  return mix;
}

namespace {

// Ratio cell, or "-" when the denominator side is empty.
std::string ratio_cell(double value, bool defined, int decimals) {
  if (!defined) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace

std::string format_schedule_table(const std::vector<ScheduleStage>& stages,
                                  const CorpusStats& in_domain,
                                  const CorpusStats& out_domain) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line,
                "%-5s  %12s %6s %6s %6s  %8s %6s %6s %6s  %6s %6s %6s  %6s %6s\n",
                "stage", "id.zh(up)", "id.en", "id.tot", "zh/en", "ood.zh",
                "ood.en", "ood.tot", "zh/en", "zh", "en", "total", "ood/id",
                "zh/en");
  out += line;
  for (const ScheduleStage& stage : stages) {
    MixSpec mix = compute_stage_mix(stage, in_domain, out_domain);
    char zh_cell[32];
    std::snprintf(zh_cell, sizeof zh_cell, "%.1f (%ld)", mix.id_zh,
                  stage.upsample_zh);
    std::snprintf(
        line, sizeof line,
        "%-5d  %12s %6.1f %6.1f %6s  %8.1f %6.1f %6.1f %6s  %6.1f %6.1f %6.1f  %6s %6s\n",
        stage.stage_index, zh_cell, mix.id_en, mix.id_total(),
        ratio_cell(mix.id_zh_en_ratio(), mix.id_en > 0.0, 1).c_str(),
        mix.ood_zh, mix.ood_en, mix.ood_total(),
        ratio_cell(mix.ood_zh_en_ratio(), mix.ood_total() > 0.0, 1).c_str(),
        mix.zh_total(), mix.en_total(), mix.grand_total(),
        ratio_cell(mix.ood_id_ratio(), mix.id_total() > 0.0, 1).c_str(),
        ratio_cell(mix.zh_en_ratio(), mix.en_total() > 0.0, 2).c_str());
    out += line;
  }
  return out;
}

CorpusStats merlion_stats() {
  CorpusStats stats;
  stats.zh_hours = 5.36;
  stats.en_hours = 21.64;
  return stats;
}

CorpusStats seame_stats() {
  // 26.8 h pool at zh/en = 2.0.
  CorpusStats stats;
  stats.zh_hours = 26.8 * 2.0 / 3.0;
  stats.en_hours = 26.8 / 3.0;
  return stats;
}

std::vector<ScheduleStage> merlion_seame_schedule(long epochs_per_stage) {
  CSLID_CHECK(epochs_per_stage >= 1, ErrorKind::kSchedule,
              "epochs_per_stage must be positive");
  const long factors[] = {1, 2, 2, 3};
  const double fractions[] = {1.0, 0.6, 0.25, 0.0};
  CorpusStats id = merlion_stats();
  CorpusStats ood = seame_stats();
  std::vector<ScheduleStage> stages;
  for (int k = 0; k < 4; ++k) {
    ScheduleStage stage;
    stage.stage_index = k + 1;
    stage.upsample_zh = factors[k];
    stage.ood_fraction = fractions[k];
    stage.epochs = epochs_per_stage;
    MixSpec mix = compute_stage_mix(stage, id, ood);
    stage.target_ood_id_ratio = mix.ood_id_ratio();
    stages.push_back(stage);
  }
  return stages;
}

namespace {

// Draws a seeded prefix of `pool` whose duration reaches `target_s`.  The
// result may overshoot by less than one utterance.
void draw_duration(std::vector<Utterance> pool, double target_s, Rng& rng,
                   std::vector<Utterance>* out) {
  if (target_s <= 0.0) return;
  rng.shuffle(pool);
  double cum = 0.0;
  for (Utterance& utt : pool) {
    if (cum >= target_s) break;
    cum += utt.duration_s;
    out->push_back(std::move(utt));
  }
}

}  // namespace

RealizedStage realize_stage(const ScheduleStage& stage,
                            const Manifest& in_domain,
                            const Manifest& out_domain, Rng& rng) {
  CSLID_CHECK(stage.upsample_zh >= 1, ErrorKind::kSchedule,
              "up-sampling factor must be positive");
  CSLID_CHECK(stage.ood_fraction >= 0.0, ErrorKind::kSchedule,
              "negative pool fraction");
  RealizedStage realized;
  realized.capped = stage.ood_fraction > 1.0;
  double fraction = std::min(1.0, stage.ood_fraction);

  Manifest upsampled = upsample_class(in_domain, Language::kMandarin,
                                      static_cast<int>(stage.upsample_zh));
  std::vector<Utterance> pool_zh, pool_en;
  for (const Utterance& utt : out_domain.utterances) {
    (utt.language == Language::kMandarin ? pool_zh : pool_en).push_back(utt);
  }

  std::vector<Utterance> mixed = std::move(upsampled.utterances);
  if (fraction >= 1.0) {
    mixed.insert(mixed.end(), pool_zh.begin(), pool_zh.end());
    mixed.insert(mixed.end(), pool_en.begin(), pool_en.end());
  } else {
    // Equal fractions of each language preserve the pool's internal ratio.
    draw_duration(std::move(pool_zh),
                  fraction * out_domain.duration_s(Language::kMandarin), rng,
                  &mixed);
    draw_duration(std::move(pool_en),
                  fraction * out_domain.duration_s(Language::kEnglish), rng,
                  &mixed);
  }
  rng.shuffle(mixed);
  realized.manifest.utterances = std::move(mixed);
  return realized;
}

}  // namespace cslid
