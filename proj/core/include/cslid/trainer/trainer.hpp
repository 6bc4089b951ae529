// core/include/cslid/trainer/trainer.hpp

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

#ifndef CSLID_TRAINER_TRAINER_HPP_
#define CSLID_TRAINER_TRAINER_HPP_

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cslid/corpus/lexicon.hpp"
#include "cslid/corpus/manifest.hpp"
#include "cslid/dsp/fbank.hpp"
#include "cslid/dsp/specaug.hpp"
#include "cslid/metrics/metrics.hpp"
#include "cslid/models/checkpoint.hpp"
#include "cslid/models/config.hpp"
#include "cslid/sampler/batching.hpp"
#include "cslid/sampler/schedule.hpp"

namespace cslid {

enum class FtMethod { kOneStage, kCombined, kGradual, kTwoStage };

const char* ft_method_name(FtMethod method);
FtMethod parse_ft_method(const std::string& name);  // kConfig otherwise

// A gradual fine-tuning stage as stored in run configs; resolved against the
// actual corpora when the plan is built.
struct ScheduleEntry {
  double ratio = 0.0;    // target out-of-domain : in-domain duration ratio
  long upsample_zh = 1;  // in-domain zh up-sampling factor
  long epochs = 1;
};

struct TrainConfig {
  std::string model_kind = "crnn";  // "crnn" or "mtl"
  long pretrain_epochs = 5;
  long finetune_epochs = 10;
  double pretrain_lr = 1e-4;
  double finetune_lr = 1e-5;
  double dropout = 0.1;
  double max_batch_duration_s = 120.0;
  std::uint64_t seed = 17;
  double lambda_lid = 0.2;
  double alpha_lid = 100.0;
  FtMethod ft_method = FtMethod::kOneStage;
  std::vector<ScheduleEntry> schedule;  // gradual fine-tuning only
  double grad_clip_norm = 5.0;
  double holdout_fraction = 0.05;
  bool speed_perturb = false;  // train on 0.9x/1.0x/1.1x waveform copies
  bool spec_augment = false;   // mask features on the fly during training
  // Stop a pretrain epoch loop once the holdout balanced accuracy reaches
  // this value; 0 disables the shortcut and every epoch runs.
  double stop_at_bac = 0.0;
  FbankConfig fbank;
  CrnnConfig crnn;
  MtlConfig mtl;
};

// JSON round trip for run configs.  Parsing rejects unknown keys by name and
// reports structural problems as config errors.
std::string serialize_train_config(const TrainConfig& config);
TrainConfig parse_train_config(const std::string& text,
                               const std::string& origin);
TrainConfig load_train_config(const std::string& path);

// Word-to-phoneme mapping shared by transcript consumers.
struct TranscriptTokenizer {
  Lexicon en;
  Lexicon zh;
  Vocabulary vocab;

  TokenSequence tokenize(const Utterance& utt) const {
    const Lexicon& lex = utt.language == Language::kMandarin ? zh : en;
    return tokenize_transcript(utt.transcript, utt.language, lex, vocab);
  }
};

// Computes and caches filterbank features for manifest utterances.  When a
// cache directory is set, files named <id>.fbnk are used before decoding
// audio.  Ids may carry "#dup" copies and "@0.9"/"@1.1" speed suffixes; the
// cache resolves both to the underlying source span.
class FeatureSource {
 public:
  explicit FeatureSource(FbankConfig config, std::string cache_dir = "");

  const FeatureMatrix& get(const Utterance& utt);
  const FbankConfig& config() const { return config_; }

 private:
  FeatureMatrix compute(const Utterance& utt, double speed_factor) const;

  FbankConfig config_;
  std::string cache_dir_;
  std::unordered_map<std::string, FeatureMatrix> cache_;
};

// Triples a manifest with 0.9x and 1.1x speed copies ("<id>@0.9").  The
// copies keep the source-span duration for batch packing.
Manifest expand_speed_perturb(const Manifest& manifest);

// One (data, epochs, loss set) step of a fine-tuning plan.
enum class BatchMode { kBalanced, kDurationMix, kShuffled };

struct StageSpec {
  std::string name;
  BatchMode mode = BatchMode::kShuffled;
  Manifest primary;
  Manifest secondary;  // kDurationMix draws from primary and secondary
  long epochs = 1;
  bool use_ctc = false;
  bool use_lid = true;
  bool capped = false;  // stage asked for more out-of-domain data than exists
};

struct StagePlan {
  std::vector<StageSpec> stages;
};

// Realizes the fine-tuning data plan: one_stage trains on the in-domain set;
// combined draws a duration-balanced 1:1 mix; gradual materializes the
// configured schedule stages; two_stage runs combined then in-domain only.
StagePlan build_finetune_plan(const TrainConfig& config,
                              const Manifest& in_domain,
                              const Manifest& out_domain, Rng& rng);

// Model handle that hides the concrete kind behind checkpoint dispatch.
class AnyModel {
 public:
  static AnyModel from_checkpoint(const Checkpoint& ckpt);

  const std::string& kind() const { return kind_; }
  std::pair<Language, double> predict(const FeatureMatrix& features) const;

 private:
  std::string kind_;
  std::shared_ptr<struct CrnnModel> crnn_;
  std::shared_ptr<struct MtlModel> mtl_;
};

struct PretrainResult {
  Checkpoint best;
  int best_epoch = 0;
  double best_bac = 0.0;
  std::vector<double> epoch_bac;
  std::vector<std::string> checkpoint_paths;
};

// Trains from scratch on language-balanced batches of the two monolingual
// corpora: cross entropy on the language label for the CRNN, the joint
// CTC + language loss for the MTL model (which needs the tokenizer).  Saves
// one checkpoint per epoch under <run_dir>/checkpoints and returns the one
// with the best holdout balanced accuracy (ties go to the earlier epoch).
PretrainResult pretrain(const TrainConfig& config, const Manifest& en_manifest,
                        const Manifest& zh_manifest, FeatureSource& features,
                        const TranscriptTokenizer* tokenizer,
                        const std::string& run_dir);

struct FinetuneResult {
  Checkpoint final_ckpt;
  std::vector<std::string> checkpoint_paths;
  bool capped_stage = false;  // a gradual stage exceeded its pool
};

// Runs the fine-tuning plan with the language loss only, starting from the
// given checkpoint or from random initialization when `init` is null.  The
// MTL phoneme head is left out of the optimizer, so its parameters do not
// move.  Returns the final checkpoint.
FinetuneResult finetune(const TrainConfig& config, const Checkpoint* init,
                        const Manifest& in_domain, const Manifest& out_domain,
                        FeatureSource& features, const std::string& run_dir);

struct EvaluationOutput {
  EvalReport report;
  std::vector<ScoredTrial> trials;
};

// Deterministic eval-mode scoring of every utterance in the manifest.
EvaluationOutput evaluate_model(const AnyModel& model, const Manifest& manifest,
                                FeatureSource& features);

// Index of the checkpoint with the best balanced accuracy on the manifest;
// ties go to the earlier entry.
size_t select_best_checkpoint(const std::vector<Checkpoint>& checkpoints,
                              const Manifest& eval_manifest,
                              FeatureSource& features);

}  // namespace cslid

#endif  // CSLID_TRAINER_TRAINER_HPP_
