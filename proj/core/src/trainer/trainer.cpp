// core/src/trainer/trainer.cpp

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

#include "cslid/trainer/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <utility>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"
#include "cslid/dsp/audio.hpp"
#include "cslid/models/crnn.hpp"
#include "cslid/models/mtl.hpp"
#include "cslid/tensor/optim.hpp"

namespace cslid {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* ft_method_name(FtMethod method) {
  switch (method) {
    case FtMethod::kOneStage:
      return "one_stage";
    case FtMethod::kCombined:
      return "combined";
    case FtMethod::kGradual:
      return "gradual";
    case FtMethod::kTwoStage:
      return "two_stage";
  }
  throw_error(ErrorKind::kState, "unreachable ft method");
}

FtMethod parse_ft_method(const std::string& name) {
  if (name == "one_stage") return FtMethod::kOneStage;
  if (name == "combined") return FtMethod::kCombined;
  if (name == "gradual") return FtMethod::kGradual;
  if (name == "two_stage") return FtMethod::kTwoStage;
  throw_error(ErrorKind::kConfig, "unknown ft_method: " + name);
}

namespace {

std::string strf(const char* format, ...) {
  va_list ap;
  va_start(ap, format);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, format, ap);
  va_end(ap);
  return buf;
}

// Plain-text run log.  No timestamps: two runs with the same seed must write
// the same bytes.
class TrainLog {
 public:
  explicit TrainLog(const std::string& path) : out_(path, std::ios::trunc) {
    CSLID_CHECK(out_.good(), ErrorKind::kIo, "cannot open log file: " + path);
  }
  void line(const std::string& text) {
    out_ << text << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

void check_known_keys(const json& j, std::initializer_list<const char*> allowed,
                      const std::string& origin) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    CSLID_CHECK(known, ErrorKind::kConfig,
                origin + ": unknown config key: " + it.key());
  }
}

json fbank_to_json(const FbankConfig& cfg) {
  json j;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["frame_length_s"] = cfg.frame_length_s;
  j["frame_shift_s"] = cfg.frame_shift_s;
  j["num_bins"] = cfg.num_bins;
  j["low_freq_hz"] = cfg.low_freq_hz;
  j["high_freq_hz"] = cfg.high_freq_hz;
  j["preemphasis"] = cfg.preemphasis;
  return j;
}

void fbank_from_json(const json& j, FbankConfig* cfg,
                     const std::string& origin) {
  check_known_keys(j,
                   {"sample_rate_hz", "frame_length_s", "frame_shift_s",
                    "num_bins", "low_freq_hz", "high_freq_hz", "preemphasis"},
                   origin);
  if (j.contains("sample_rate_hz")) cfg->sample_rate_hz = j["sample_rate_hz"];
  if (j.contains("frame_length_s")) cfg->frame_length_s = j["frame_length_s"];
  if (j.contains("frame_shift_s")) cfg->frame_shift_s = j["frame_shift_s"];
  if (j.contains("num_bins")) cfg->num_bins = j["num_bins"];
  if (j.contains("low_freq_hz")) cfg->low_freq_hz = j["low_freq_hz"];
  if (j.contains("high_freq_hz")) cfg->high_freq_hz = j["high_freq_hz"];
  if (j.contains("preemphasis")) cfg->preemphasis = j["preemphasis"];
}

void crnn_from_json(const json& j, CrnnConfig* cfg, const std::string& origin) {
  check_known_keys(
      j, {"num_mels", "channels", "gru_layers", "gru_hidden", "dropout"},
      origin);
  if (j.contains("num_mels")) cfg->num_mels = j["num_mels"];
  if (j.contains("channels"))
    cfg->channels = j["channels"].get<std::vector<long>>();
  if (j.contains("gru_layers")) cfg->gru_layers = j["gru_layers"];
  if (j.contains("gru_hidden")) cfg->gru_hidden = j["gru_hidden"];
  if (j.contains("dropout")) cfg->dropout = j["dropout"];
}

void mtl_from_json(const json& j, MtlConfig* cfg, const std::string& origin) {
  check_known_keys(j,
                   {"num_mels", "encoder", "d_model", "num_blocks", "heads",
                    "ffn_expansion", "conv_kernel", "vocab_size", "lid_hidden",
                    "lambda_lid", "alpha_lid", "dropout"},
                   origin);
  if (j.contains("num_mels")) cfg->num_mels = j["num_mels"];
  if (j.contains("encoder")) cfg->encoder = j["encoder"].get<std::string>();
  if (j.contains("d_model")) cfg->d_model = j["d_model"];
  if (j.contains("num_blocks")) cfg->num_blocks = j["num_blocks"];
  if (j.contains("heads")) cfg->heads = j["heads"];
  if (j.contains("ffn_expansion")) cfg->ffn_expansion = j["ffn_expansion"];
  if (j.contains("conv_kernel")) cfg->conv_kernel = j["conv_kernel"];
  if (j.contains("vocab_size")) cfg->vocab_size = j["vocab_size"];
  if (j.contains("lid_hidden")) cfg->lid_hidden = j["lid_hidden"];
  if (j.contains("lambda_lid")) cfg->lambda_lid = j["lambda_lid"];
  if (j.contains("alpha_lid")) cfg->alpha_lid = j["alpha_lid"];
  if (j.contains("dropout")) cfg->dropout = j["dropout"];
}

}  // namespace

std::string serialize_train_config(const TrainConfig& config) {
  json j;
  j["model"] = config.model_kind;
  j["pretrain_epochs"] = config.pretrain_epochs;
  j["finetune_epochs"] = config.finetune_epochs;
  j["pretrain_lr"] = config.pretrain_lr;
  j["finetune_lr"] = config.finetune_lr;
  j["dropout"] = config.dropout;
  j["max_batch_duration_s"] = config.max_batch_duration_s;
  j["seed"] = config.seed;
  j["lambda"] = config.lambda_lid;
  j["alpha"] = config.alpha_lid;
  j["ft_method"] = ft_method_name(config.ft_method);
  json schedule = json::array();
  for (const ScheduleEntry& entry : config.schedule) {
    json e;
    e["ratio"] = entry.ratio;
    e["upsample_zh"] = entry.upsample_zh;
    e["epochs"] = entry.epochs;
    schedule.push_back(e);
  }
  j["schedule"] = schedule;
  j["grad_clip_norm"] = config.grad_clip_norm;
  j["holdout_fraction"] = config.holdout_fraction;
  j["speed_perturb"] = config.speed_perturb;
  j["spec_augment"] = config.spec_augment;
  j["stop_at_bac"] = config.stop_at_bac;
  j["fbank"] = fbank_to_json(config.fbank);
  j["crnn"] = json::parse(serialize_crnn_config(config.crnn));
  j["mtl"] = json::parse(serialize_mtl_config(config.mtl));
  return j.dump(2) + "\n";
}

TrainConfig parse_train_config(const std::string& text,
                               const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  CSLID_CHECK(!j.is_discarded() && j.is_object(), ErrorKind::kConfig,
              origin + ": config must be a JSON object");
  check_known_keys(j,
                   {"model", "pretrain_epochs", "finetune_epochs",
                    "pretrain_lr", "finetune_lr", "dropout",
                    "max_batch_duration_s", "seed", "lambda", "alpha",
                    "ft_method", "schedule", "grad_clip_norm",
                    "holdout_fraction", "speed_perturb", "spec_augment",
                    "stop_at_bac", "fbank", "crnn", "mtl"},
                   origin);
  TrainConfig config;
  try {
    if (j.contains("model")) config.model_kind = j["model"].get<std::string>();
    if (j.contains("pretrain_epochs"))
      config.pretrain_epochs = j["pretrain_epochs"];
    if (j.contains("finetune_epochs"))
      config.finetune_epochs = j["finetune_epochs"];
    if (j.contains("pretrain_lr")) config.pretrain_lr = j["pretrain_lr"];
    if (j.contains("finetune_lr")) config.finetune_lr = j["finetune_lr"];
    if (j.contains("dropout")) config.dropout = j["dropout"];
    if (j.contains("max_batch_duration_s"))
      config.max_batch_duration_s = j["max_batch_duration_s"];
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("lambda")) config.lambda_lid = j["lambda"];
    if (j.contains("alpha")) config.alpha_lid = j["alpha"];
    if (j.contains("ft_method"))
      config.ft_method = parse_ft_method(j["ft_method"].get<std::string>());
    if (j.contains("schedule")) {
      CSLID_CHECK(j["schedule"].is_array(), ErrorKind::kConfig,
                  origin + ": schedule must be an array");
      for (const json& e : j["schedule"]) {
        check_known_keys(e, {"ratio", "upsample_zh", "epochs"},
                         origin + ": schedule");
        ScheduleEntry entry;
        if (e.contains("ratio")) entry.ratio = e["ratio"];
        if (e.contains("upsample_zh")) entry.upsample_zh = e["upsample_zh"];
        if (e.contains("epochs")) entry.epochs = e["epochs"];
        config.schedule.push_back(entry);
      }
    }
    if (j.contains("grad_clip_norm"))
      config.grad_clip_norm = j["grad_clip_norm"];
    if (j.contains("holdout_fraction"))
      config.holdout_fraction = j["holdout_fraction"];
    if (j.contains("speed_perturb"))
      config.speed_perturb = j["speed_perturb"].get<bool>();
    if (j.contains("spec_augment"))
      config.spec_augment = j["spec_augment"].get<bool>();
    if (j.contains("stop_at_bac")) config.stop_at_bac = j["stop_at_bac"];
    if (j.contains("fbank")) fbank_from_json(j["fbank"], &config.fbank, origin);
    if (j.contains("crnn")) crnn_from_json(j["crnn"], &config.crnn, origin);
    if (j.contains("mtl")) mtl_from_json(j["mtl"], &config.mtl, origin);
  } catch (const json::exception& e) {
    throw_error(ErrorKind::kConfig, origin + ": " + e.what());
  }
  CSLID_CHECK(config.model_kind == "crnn" || config.model_kind == "mtl",
              ErrorKind::kConfig,
              origin + ": model must be \"crnn\" or \"mtl\"");
  CSLID_CHECK(config.pretrain_epochs >= 1 && config.finetune_epochs >= 1,
              ErrorKind::kConfig, origin + ": epochs must be positive");
  CSLID_CHECK(config.pretrain_lr > 0.0 && config.finetune_lr > 0.0,
              ErrorKind::kConfig, origin + ": learning rates must be positive");
  CSLID_CHECK(config.max_batch_duration_s > 0.0, ErrorKind::kConfig,
              origin + ": max_batch_duration_s must be positive");
  CSLID_CHECK(0.0 <= config.lambda_lid && config.lambda_lid <= 1.0,
              ErrorKind::kConfig, origin + ": lambda must lie in [0, 1]");
  CSLID_CHECK(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0,
              ErrorKind::kConfig,
              origin + ": holdout_fraction must lie in (0, 1)");
  return config;
}

TrainConfig load_train_config(const std::string& path) {
  return parse_train_config(read_file_text(path), path);
}

// ---------------------------------------------------------------------------
// Features

FeatureSource::FeatureSource(FbankConfig config, std::string cache_dir)
    : config_(config), cache_dir_(std::move(cache_dir)) {}

namespace {

// "<base>[#dupN][@speed]" -> base id + speed factor.  Up-sampling appends
// #dup copies; speed expansion appends @0.9 / @1.1.
struct IdParts {
  std::string base;
  double speed = 1.0;
};

IdParts split_utterance_id(const std::string& id) {
  IdParts parts;
  parts.base = id;
  auto ends_with = [&](const char* suffix) {
    size_t n = std::string(suffix).size();
    return parts.base.size() >= n &&
           parts.base.compare(parts.base.size() - n, n, suffix) == 0;
  };
  if (ends_with("@0.9")) {
    parts.speed = 0.9;
    parts.base.resize(parts.base.size() - 4);
  } else if (ends_with("@1.1")) {
    parts.speed = 1.1;
    parts.base.resize(parts.base.size() - 4);
  }
  size_t dup = parts.base.find("#dup");
  if (dup != std::string::npos) parts.base.resize(dup);
  return parts;
}

}  // namespace

const FeatureMatrix& FeatureSource::get(const Utterance& utt) {
  IdParts parts = split_utterance_id(utt.id);
  std::string key = utt.audio_path + "|" + std::to_string(utt.offset_s) + "|" +
                    std::to_string(utt.duration_s) + "|" +
                    std::to_string(parts.speed);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  if (!cache_dir_.empty() && parts.speed == 1.0) {
    fs::path file = fs::path(cache_dir_) / (parts.base + ".fbnk");
    if (fs::exists(file)) {
      return cache_.emplace(key, read_features(file.string())).first->second;
    }
  }
  return cache_.emplace(key, compute(utt, parts.speed)).first->second;
}

FeatureMatrix FeatureSource::compute(const Utterance& utt,
                                     double speed_factor) const {
  AudioBuffer audio = read_wav(utt.audio_path);
  audio = slice(audio, utt.offset_s, utt.duration_s);
  audio = resample(audio, config_.sample_rate_hz);
  if (speed_factor != 1.0) audio = speed_perturb(audio, speed_factor);
  return extract_fbank(audio, config_);
}

Manifest expand_speed_perturb(const Manifest& manifest) {
  Manifest out;
  out.utterances.reserve(manifest.utterances.size() * 3);
  for (const Utterance& utt : manifest.utterances) {
    out.utterances.push_back(utt);
    for (const char* suffix : {"@0.9", "@1.1"}) {
      Utterance copy = utt;
      copy.id += suffix;
      out.utterances.push_back(std::move(copy));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plans

StagePlan build_finetune_plan(const TrainConfig& config,
                              const Manifest& in_domain,
                              const Manifest& out_domain, Rng& rng) {
  CSLID_CHECK(!in_domain.utterances.empty(), ErrorKind::kArgument,
              "empty in-domain manifest");
  StagePlan plan;
  switch (config.ft_method) {
    case FtMethod::kOneStage: {
      StageSpec stage;
      stage.name = "one_stage";
      stage.mode = BatchMode::kShuffled;
      stage.primary = in_domain;
      stage.epochs = config.finetune_epochs;
      plan.stages.push_back(std::move(stage));
      break;
    }
    case FtMethod::kCombined: {
      CSLID_CHECK(!out_domain.utterances.empty(), ErrorKind::kArgument,
                  "combined fine-tuning needs an out-of-domain corpus");
      StageSpec stage;
      stage.name = "combined";
      stage.mode = BatchMode::kDurationMix;
      stage.primary = in_domain;
      stage.secondary = out_domain;
      stage.epochs = config.finetune_epochs;
      plan.stages.push_back(std::move(stage));
      break;
    }
    case FtMethod::kGradual: {
      CSLID_CHECK(!config.schedule.empty(), ErrorKind::kConfig,
                  "gradual fine-tuning needs a schedule");
      std::vector<double> ratios;
      std::vector<long> factors;
      for (const ScheduleEntry& entry : config.schedule) {
        ratios.push_back(entry.ratio);
        factors.push_back(entry.upsample_zh);
      }
      std::vector<ScheduleStage> stages =
          build_gft_schedule(CorpusStats::of(in_domain),
                             CorpusStats::of(out_domain), ratios, factors, 1);
      for (size_t k = 0; k < stages.size(); ++k) {
        stages[k].epochs = config.schedule[k].epochs;
        RealizedStage realized =
            realize_stage(stages[k], in_domain, out_domain, rng);
        StageSpec stage;
        stage.name = strf("gradual-stage%d", stages[k].stage_index);
        stage.mode = BatchMode::kShuffled;
        stage.primary = std::move(realized.manifest);
        stage.epochs = stages[k].epochs;
        stage.capped = realized.capped;
        plan.stages.push_back(std::move(stage));
      }
      break;
    }
    case FtMethod::kTwoStage: {
      CSLID_CHECK(!out_domain.utterances.empty(), ErrorKind::kArgument,
                  "two-stage fine-tuning needs an out-of-domain corpus");
      StageSpec mixed;
      mixed.name = "two_stage-mixed";
      mixed.mode = BatchMode::kDurationMix;
      mixed.primary = in_domain;
      mixed.secondary = out_domain;
      mixed.epochs = config.finetune_epochs;
      plan.stages.push_back(std::move(mixed));
      StageSpec pure;
      pure.name = "two_stage-indomain";
      pure.mode = BatchMode::kShuffled;
      pure.primary = in_domain;
      pure.epochs = config.finetune_epochs;
      plan.stages.push_back(std::move(pure));
      break;
    }
  }
  // Fine-tuning optimizes the language loss only.
  for (StageSpec& stage : plan.stages) {
    stage.use_ctc = false;
    stage.use_lid = true;
    if (config.speed_perturb) {
      stage.primary = expand_speed_perturb(stage.primary);
      if (stage.mode == BatchMode::kDurationMix) {
        stage.secondary = expand_speed_perturb(stage.secondary);
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Models

AnyModel AnyModel::from_checkpoint(const Checkpoint& ckpt) {
  AnyModel model;
  model.kind_ = ckpt.kind;
  if (ckpt.kind == "crnn") {
    model.crnn_ = std::make_shared<CrnnModel>(CrnnModel::from_checkpoint(ckpt));
  } else if (ckpt.kind == "mtl") {
    model.mtl_ = std::make_shared<MtlModel>(MtlModel::from_checkpoint(ckpt));
  } else {
    throw_error(ErrorKind::kConfig, "unknown checkpoint kind: " + ckpt.kind);
  }
  return model;
}

std::pair<Language, double> AnyModel::predict(
    const FeatureMatrix& features) const {
  if (crnn_) return crnn_->predict(features);
  CSLID_CHECK(mtl_ != nullptr, ErrorKind::kState, "model not initialized");
  return mtl_->predict(features);
}

// ---------------------------------------------------------------------------
// Training steps

namespace {

int language_label(const Utterance& utt) {
  return utt.language == Language::kMandarin ? 1 : 0;
}

struct StepStats {
  float loss = 0.0f;
  float ctc = 0.0f;
  float lid = 0.0f;
};

// Every training step follows the same shape: accumulate per-utterance
// losses on one tape, average, run backward, clip, and apply Adam.
void apply_update(Tape<float>& tp, Var loss, Adam<float>& adam,
                  double clip_norm) {
  adam.zero_grad();
  tp.backward(loss);
  clip_global_norm(adam.registered(), clip_norm);
  adam.step();
}

StepStats crnn_batch_step(CrnnModel& model, const UtteranceBatch& batch,
                          FeatureSource& features, const TrainConfig& config,
                          Adam<float>& adam, Rng& dropout_rng, Rng& sa_rng) {
  Tape<float> tp;
  Var acc{-1};
  const SpecAugmentConfig sa_cfg;
  for (const Utterance& utt : batch.utterances) {
    const FeatureMatrix& raw = features.get(utt);
    FeatureMatrix masked;
    const FeatureMatrix* feat = &raw;
    if (config.spec_augment) {
      masked = apply_specaugment(raw, sa_cfg, sa_rng);
      feat = &masked;
    }
    Var logits = model.forward(tp, *feat, true, &dropout_rng);
    Var ce = softmax_cross_entropy(tp, logits, {language_label(utt)});
    acc = acc.ok() ? add(tp, acc, ce) : ce;
  }
  Var loss =
      scale(tp, acc, 1.0f / static_cast<float>(batch.utterances.size()));
  apply_update(tp, loss, adam, config.grad_clip_norm);
  StepStats stats;
  stats.loss = stats.lid = tp.val(loss).values[0];
  return stats;
}

StepStats mtl_batch_step(MtlModel& model, const UtteranceBatch& batch,
                         FeatureSource& features,
                         const TranscriptTokenizer* tokenizer, bool use_ctc,
                         const TrainConfig& config, Adam<float>& adam,
                         Rng& dropout_rng, Rng& sa_rng) {
  Tape<float> tp;
  Var ctc_acc{-1}, lid_acc{-1};
  const SpecAugmentConfig sa_cfg;
  for (const Utterance& utt : batch.utterances) {
    const FeatureMatrix& raw = features.get(utt);
    FeatureMatrix masked;
    const FeatureMatrix* feat = &raw;
    if (config.spec_augment) {
      masked = apply_specaugment(raw, sa_cfg, sa_rng);
      feat = &masked;
    }
    MtlModel::Output out = model.forward(tp, *feat, true, &dropout_rng);
    if (use_ctc) {
      TokenSequence tokens = tokenizer->tokenize(utt);
      Var c = ctc_loss(tp, out.ctc_log_probs, tokens.ids);
      ctc_acc = ctc_acc.ok() ? add(tp, ctc_acc, c) : c;
    }
    Var l = softmax_cross_entropy(tp, out.lid_logits, {language_label(utt)});
    lid_acc = lid_acc.ok() ? add(tp, lid_acc, l) : l;
  }
  float inv = 1.0f / static_cast<float>(batch.utterances.size());
  Var lid_mean = scale(tp, lid_acc, inv);
  StepStats stats;
  stats.lid = tp.val(lid_mean).values[0];
  Var loss = lid_mean;
  if (use_ctc) {
    Var ctc_mean = scale(tp, ctc_acc, inv);
    stats.ctc = tp.val(ctc_mean).values[0];
    loss = joint_loss(tp, ctc_mean, lid_mean, config.lambda_lid,
                      config.alpha_lid);
  }
  stats.loss = tp.val(loss).values[0];
  apply_update(tp, loss, adam, config.grad_clip_norm);
  return stats;
}

template <typename ModelT>
std::vector<ScoredTrial> score_manifest(ModelT& model, const Manifest& manifest,
                                        FeatureSource& features) {
  std::vector<ScoredTrial> trials;
  trials.reserve(manifest.utterances.size());
  for (const Utterance& utt : manifest.utterances) {
    std::pair<Language, double> pred = model.predict(features.get(utt));
    ScoredTrial trial;
    trial.id = utt.id;
    trial.label = utt.language;
    trial.predicted = pred.first;
    trial.zh_score = pred.second;
    trials.push_back(std::move(trial));
  }
  return trials;
}

BatchStream make_stream(const StageSpec& stage, double max_batch_duration_s,
                        Rng& rng) {
  switch (stage.mode) {
    case BatchMode::kBalanced:
      return balanced_language_batches(stage.primary, max_batch_duration_s,
                                       rng);
    case BatchMode::kDurationMix:
      return duration_balanced_mix(stage.primary, stage.secondary,
                                   max_batch_duration_s, rng);
    case BatchMode::kShuffled:
      return shuffled_batches(stage.primary, max_batch_duration_s, rng);
  }
  throw_error(ErrorKind::kState, "unreachable batch mode");
}

std::string checkpoint_path(const std::string& run_dir, const std::string& tag,
                            long epoch) {
  return run_dir + "/checkpoints/" + tag + strf("-epoch-%03ld", epoch) +
         ".ckpt";
}

// Rng stream ids.  Pretraining and fine-tuning draw from disjoint streams of
// the same seed so a combined run stays reproducible.
enum : std::uint64_t {
  kStreamHoldout = 1,
  kStreamPretrainInit = 2,
  kStreamPretrainSampler = 3,
  kStreamPretrainDropout = 4,
  kStreamPretrainSpecAug = 5,
  kStreamPlan = 11,
  kStreamFinetuneInit = 12,
  kStreamFinetuneSampler = 13,
  kStreamFinetuneDropout = 14,
  kStreamFinetuneSpecAug = 15,
};

}  // namespace

// ---------------------------------------------------------------------------
// Orchestration

PretrainResult pretrain(const TrainConfig& config, const Manifest& en_manifest,
                        const Manifest& zh_manifest, FeatureSource& features,
                        const TranscriptTokenizer* tokenizer,
                        const std::string& run_dir) {
  CSLID_CHECK(!en_manifest.utterances.empty() &&
                  !zh_manifest.utterances.empty(),
              ErrorKind::kArgument,
              "pretraining needs both monolingual corpora");
  bool is_mtl = config.model_kind == "mtl";
  CSLID_CHECK(config.model_kind == "crnn" || is_mtl, ErrorKind::kConfig,
              "model must be \"crnn\" or \"mtl\"");
  if (is_mtl) {
    CSLID_CHECK(tokenizer != nullptr, ErrorKind::kConfig,
                "mtl pretraining needs lexicons");
    for (const Manifest* m : {&en_manifest, &zh_manifest}) {
      for (const Utterance& utt : m->utterances) {
        CSLID_CHECK(!utt.transcript.empty(), ErrorKind::kConfig,
                    "mtl pretraining needs transcripts; missing for " + utt.id);
      }
    }
  }

  fs::create_directories(fs::path(run_dir) / "checkpoints");
  write_file_text(run_dir + "/config.json", serialize_train_config(config));
  TrainLog log(run_dir + "/pretrain.log");

  Manifest all;
  all.utterances = en_manifest.utterances;
  all.utterances.insert(all.utterances.end(), zh_manifest.utterances.begin(),
                        zh_manifest.utterances.end());
  Rng root(config.seed);
  Rng holdout_rng = root.fork(kStreamHoldout);
  HoldoutSplit split = split_holdout(all, config.holdout_fraction, holdout_rng);
  Manifest train = split.train;
  if (config.speed_perturb) train = expand_speed_perturb(train);
  log.line(strf("pretrain model=%s train_utts=%zu holdout_utts=%zu epochs=%ld",
                config.model_kind.c_str(), train.utterances.size(),
                split.holdout.utterances.size(), config.pretrain_epochs));

  Rng init_rng = root.fork(kStreamPretrainInit);
  CrnnModel crnn;
  MtlModel mtl;
  if (is_mtl) {
    MtlConfig mcfg = config.mtl;
    mcfg.dropout = config.dropout;
    mcfg.lambda_lid = config.lambda_lid;
    mcfg.alpha_lid = config.alpha_lid;
    mcfg.vocab_size = tokenizer->vocab.size();
    mtl.init(mcfg, init_rng);
  } else {
    CrnnConfig ccfg = config.crnn;
    ccfg.dropout = config.dropout;
    crnn.init(ccfg, init_rng);
  }

  AdamConfig adam_cfg;
  adam_cfg.lr = config.pretrain_lr;
  Adam<float> adam(is_mtl ? mtl.params() : crnn.params(), adam_cfg);

  Rng sampler_root = root.fork(kStreamPretrainSampler);
  Rng dropout_rng = root.fork(kStreamPretrainDropout);
  Rng specaug_root = root.fork(kStreamPretrainSpecAug);

  PretrainResult result;
  std::vector<Checkpoint> checkpoints;
  for (long epoch = 1; epoch <= config.pretrain_epochs; ++epoch) {
    Rng epoch_rng = sampler_root.fork(static_cast<std::uint64_t>(epoch));
    Rng sa_rng = specaug_root.fork(static_cast<std::uint64_t>(epoch));
    BatchStream stream =
        balanced_language_batches(train, config.max_batch_duration_s,
                                  epoch_rng);
    if (stream.unbalanced_fallback) {
      log.line("warning: single-language pool, batches are unbalanced");
    }
    double epoch_loss = 0.0;
    for (size_t b = 0; b < stream.batches.size(); ++b) {
      StepStats stats =
          is_mtl ? mtl_batch_step(mtl, stream.batches[b], features, tokenizer,
                                  true, config, adam, dropout_rng, sa_rng)
                 : crnn_batch_step(crnn, stream.batches[b], features, config,
                                   adam, dropout_rng, sa_rng);
      epoch_loss += stats.loss;
      log.line(strf("pretrain epoch %ld batch %zu loss %.6f ctc %.6f lid %.6f",
                    epoch, b + 1, stats.loss, stats.ctc, stats.lid));
    }
    double mean_loss =
        stream.batches.empty()
            ? 0.0
            : epoch_loss / static_cast<double>(stream.batches.size());

    std::vector<ScoredTrial> trials =
        is_mtl ? score_manifest(mtl, split.holdout, features)
               : score_manifest(crnn, split.holdout, features);
    double bac = balanced_accuracy(trials);

    Checkpoint ckpt = is_mtl ? mtl.to_checkpoint(static_cast<int>(epoch), bac)
                             : crnn.to_checkpoint(static_cast<int>(epoch), bac);
    std::string path = checkpoint_path(run_dir, "pretrain", epoch);
    save_checkpoint(path, ckpt);
    result.checkpoint_paths.push_back(path);
    result.epoch_bac.push_back(bac);
    checkpoints.push_back(std::move(ckpt));
    log.line(strf("pretrain epoch %ld done mean_loss %.6f holdout_bac %.6f",
                  epoch, mean_loss, bac));
    if (config.stop_at_bac > 0.0 && bac >= config.stop_at_bac) {
      log.line(strf("pretrain stop: holdout bac %.6f reached target %.6f", bac,
                    config.stop_at_bac));
      break;
    }
  }

  size_t best = 0;
  for (size_t i = 1; i < result.epoch_bac.size(); ++i) {
    if (result.epoch_bac[i] > result.epoch_bac[best]) best = i;
  }
  result.best = std::move(checkpoints[best]);
  result.best_epoch = result.best.epoch;
  result.best_bac = result.epoch_bac[best];
  log.line(strf("pretrain best epoch %d holdout_bac %.6f", result.best_epoch,
                result.best_bac));
  return result;
}

FinetuneResult finetune(const TrainConfig& config, const Checkpoint* init,
                        const Manifest& in_domain, const Manifest& out_domain,
                        FeatureSource& features, const std::string& run_dir) {
  bool is_mtl = config.model_kind == "mtl";
  CSLID_CHECK(config.model_kind == "crnn" || is_mtl, ErrorKind::kConfig,
              "model must be \"crnn\" or \"mtl\"");
  fs::create_directories(fs::path(run_dir) / "checkpoints");
  write_file_text(run_dir + "/config.json", serialize_train_config(config));
  TrainLog log(run_dir + "/finetune.log");

  Rng root(config.seed);
  Rng plan_rng = root.fork(kStreamPlan);
  StagePlan plan = build_finetune_plan(config, in_domain, out_domain, plan_rng);

  Rng init_rng = root.fork(kStreamFinetuneInit);
  CrnnModel crnn;
  MtlModel mtl;
  if (init != nullptr) {
    CSLID_CHECK(init->kind == config.model_kind, ErrorKind::kConfig,
                "checkpoint kind \"" + init->kind +
                    "\" does not match configured model \"" +
                    config.model_kind + "\"");
    if (is_mtl) {
      mtl = MtlModel::from_checkpoint(*init);
    } else {
      crnn = CrnnModel::from_checkpoint(*init);
    }
    log.line(strf("finetune init from checkpoint epoch %d", init->epoch));
  } else {
    if (is_mtl) {
      MtlConfig mcfg = config.mtl;
      mcfg.dropout = config.dropout;
      mcfg.lambda_lid = config.lambda_lid;
      mcfg.alpha_lid = config.alpha_lid;
      mtl.init(mcfg, init_rng);
    } else {
      CrnnConfig ccfg = config.crnn;
      ccfg.dropout = config.dropout;
      crnn.init(ccfg, init_rng);
    }
    log.line("finetune init from random parameters");
  }

  AdamConfig adam_cfg;
  adam_cfg.lr = config.finetune_lr;
  Adam<float> adam(is_mtl ? mtl.finetune_params() : crnn.params(), adam_cfg);

  Rng sampler_root = root.fork(kStreamFinetuneSampler);
  Rng dropout_rng = root.fork(kStreamFinetuneDropout);
  Rng specaug_root = root.fork(kStreamFinetuneSpecAug);

  FinetuneResult result;
  long global_epoch = 0;
  double last_mean_loss = 0.0;
  for (const StageSpec& stage : plan.stages) {
    if (stage.capped) {
      result.capped_stage = true;
      log.line("warning: stage " + stage.name +
               " requested more than the out-of-domain pool holds");
    }
    log.line(strf("finetune stage %s utts=%zu epochs=%ld method=%s",
                  stage.name.c_str(), stage.primary.utterances.size(),
                  stage.epochs, ft_method_name(config.ft_method)));
    for (long e = 1; e <= stage.epochs; ++e) {
      ++global_epoch;
      Rng epoch_rng = sampler_root.fork(static_cast<std::uint64_t>(global_epoch));
      Rng sa_rng = specaug_root.fork(static_cast<std::uint64_t>(global_epoch));
      BatchStream stream =
          make_stream(stage, config.max_batch_duration_s, epoch_rng);
      double epoch_loss = 0.0;
      for (size_t b = 0; b < stream.batches.size(); ++b) {
        StepStats stats =
            is_mtl ? mtl_batch_step(mtl, stream.batches[b], features, nullptr,
                                    false, config, adam, dropout_rng, sa_rng)
                   : crnn_batch_step(crnn, stream.batches[b], features, config,
                                     adam, dropout_rng, sa_rng);
        epoch_loss += stats.loss;
        log.line(strf("finetune stage %s epoch %ld batch %zu loss %.6f",
                      stage.name.c_str(), e, b + 1, stats.loss));
      }
      last_mean_loss =
          stream.batches.empty()
              ? 0.0
              : epoch_loss / static_cast<double>(stream.batches.size());
      Checkpoint ckpt =
          is_mtl ? mtl.to_checkpoint(static_cast<int>(global_epoch),
                                     last_mean_loss)
                 : crnn.to_checkpoint(static_cast<int>(global_epoch),
                                      last_mean_loss);
      std::string path =
          checkpoint_path(run_dir, "finetune-" + stage.name, global_epoch);
      save_checkpoint(path, ckpt);
      result.checkpoint_paths.push_back(path);
      log.line(strf("finetune stage %s epoch %ld done mean_loss %.6f",
                    stage.name.c_str(), e, last_mean_loss));
    }
  }

  result.final_ckpt =
      is_mtl ? mtl.to_checkpoint(static_cast<int>(global_epoch), last_mean_loss)
             : crnn.to_checkpoint(static_cast<int>(global_epoch),
                                  last_mean_loss);
  save_checkpoint(run_dir + "/checkpoints/finetune-final.ckpt",
                  result.final_ckpt);
  log.line(strf("finetune done epochs=%ld final_loss %.6f", global_epoch,
                last_mean_loss));
  return result;
}

EvaluationOutput evaluate_model(const AnyModel& model, const Manifest& manifest,
                                FeatureSource& features) {
  CSLID_CHECK(!manifest.utterances.empty(), ErrorKind::kArgument,
              "empty evaluation manifest");
  EvaluationOutput out;
  out.trials.reserve(manifest.utterances.size());
  for (const Utterance& utt : manifest.utterances) {
    std::pair<Language, double> pred = model.predict(features.get(utt));
    ScoredTrial trial;
    trial.id = utt.id;
    trial.label = utt.language;
    trial.predicted = pred.first;
    trial.zh_score = pred.second;
    out.trials.push_back(std::move(trial));
  }
  out.report = evaluate_trials(out.trials);
  return out;
}

size_t select_best_checkpoint(const std::vector<Checkpoint>& checkpoints,
                              const Manifest& eval_manifest,
                              FeatureSource& features) {
  CSLID_CHECK(!checkpoints.empty(), ErrorKind::kArgument,
              "no checkpoints to select from");
  size_t best = 0;
  double best_bac = -1.0;
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    AnyModel model = AnyModel::from_checkpoint(checkpoints[i]);
    EvaluationOutput out = evaluate_model(model, eval_manifest, features);
    if (out.report.bac > best_bac) {
      best = i;
      best_bac = out.report.bac;
    }
  }
  return best;
}

}  // namespace cslid
