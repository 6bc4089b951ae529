// core/include/cslid/sampler/schedule.hpp

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

#ifndef CSLID_SAMPLER_SCHEDULE_HPP_
#define CSLID_SAMPLER_SCHEDULE_HPP_

#include <string>
#include <vector>

#include "cslid/common/rng.hpp"
#include "cslid/corpus/manifest.hpp"

namespace cslid {

// Per-corpus language totals in hours.
struct CorpusStats {
  double zh_hours = 0.0;
  double en_hours = 0.0;

  double total_hours() const { return zh_hours + en_hours; }
  static CorpusStats of(const Manifest& manifest);
};

// One stage of a gradual fine-tuning plan.  The in-domain corpus enters whole
// with its Mandarin class up-sampled; the out-of-domain corpus contributes a
// shrinking slice of its pool until the final stage is in-domain only.
struct ScheduleStage {
  int stage_index = 0;
  long upsample_zh = 1;              // in-domain zh up-sampling factor
  double ood_fraction = 0.0;         // share of the out-of-domain pool drawn
  double target_ood_id_ratio = 0.0;  // out-of-domain : in-domain duration
  long epochs = 1;
};

// Realized per-corpus, per-language durations for one stage, in hours.
struct MixSpec {
  int stage_index = 0;
  double id_zh = 0.0;   // in-domain Mandarin, after up-sampling
  double id_en = 0.0;   // in-domain English
  double ood_zh = 0.0;  // out-of-domain subset, Mandarin share
  double ood_en = 0.0;  // out-of-domain subset, English share

  double id_total() const { return id_zh + id_en; }
  double ood_total() const { return ood_zh + ood_en; }
  double zh_total() const { return id_zh + ood_zh; }
  double en_total() const { return id_en + ood_en; }
  double grand_total() const { return id_total() + ood_total(); }
  double ood_id_ratio() const;
  double id_zh_en_ratio() const;
  double ood_zh_en_ratio() const;
  double zh_en_ratio() const;
};

// Builds a schedule from target out-of-domain : in-domain duration ratios.
// Stage k up-samples in-domain zh by factors[k] and draws
// ratios[k] x (up-sampled in-domain duration) hours from the out-of-domain
// pool, capped at the pool size.  The ratio list must be non-increasing and
// end at 0; factors must match its length or hold one broadcast value.
std::vector<ScheduleStage> build_gft_schedule(const CorpusStats& in_domain,
                                              const CorpusStats& out_domain,
                                              const std::vector<double>& ratios,
                                              const std::vector<long>& factors,
                                              long epochs_per_stage = 1);

MixSpec compute_stage_mix(const ScheduleStage& stage,
                          const CorpusStats& in_domain,
                          const CorpusStats& out_domain);

// Renders the stages as a duration table: per-corpus zh/en/total hours, class
// ratios, and the out-of-domain share, one row per stage.
std::string format_schedule_table(const std::vector<ScheduleStage>& stages,
                                  const CorpusStats& in_domain,
                                  const CorpusStats& out_domain);

// Reference setup: MERLIon as the in-domain corpus, SEAME as the
// out-of-domain pool, four stages with zh up-sampling [1, 2, 2, 3] against
// pool fractions [1.0, 0.6, 0.25, 0.0].
CorpusStats merlion_stats();
CorpusStats seame_stats();
std::vector<ScheduleStage> merlion_seame_schedule(long epochs_per_stage = 3);

// Materializes one stage: up-samples in-domain zh, draws a seeded
// out-of-domain subset of the stage's fraction while preserving the pool's
// internal language ratio, then concatenates and shuffles.  `capped` is set
// when the stage asked for more than the pool holds.
struct RealizedStage {
  Manifest manifest;
  bool capped = false;
};
RealizedStage realize_stage(const ScheduleStage& stage,
                            const Manifest& in_domain,
                            const Manifest& out_domain, Rng& rng);

}  // namespace cslid

#endif  // CSLID_SAMPLER_SCHEDULE_HPP_
