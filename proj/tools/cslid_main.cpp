// tools/cslid_main.cpp

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

// Command-line surface.  Exit codes: 0 success, 1 runtime failure,
// 2 configuration or usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"
#include "cslid/corpus/codemix.hpp"
#include "cslid/corpus/lexicon.hpp"
#include "cslid/corpus/manifest.hpp"
#include "cslid/models/checkpoint.hpp"
#include "cslid/sampler/schedule.hpp"
#include "cslid/trainer/trainer.hpp"
#include "synthgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cslid;

namespace {

// Seed precedence: --seed flag, then CSLID_SEED, then the config value.
bool env_seed(std::uint64_t* out) {
  const char* env = std::getenv("CSLID_SEED");
  if (env == nullptr || *env == '\0') return false;
  char* end = nullptr;
  unsigned long long value = std::strtoull(env, &end, 10);
  CSLID_CHECK(end != env && *end == '\0', ErrorKind::kConfig,
              "CSLID_SEED must be an unsigned integer");
  *out = value;
  return true;
}

struct RunPaths {
  std::string en_manifest;
  std::string zh_manifest;
  std::string in_domain;
  std::string out_domain;
  std::string lexicon_en;
  std::string lexicon_zh;
  std::string features_dir;
  std::string run_dir;
  std::string model;
  std::string manifest;
  std::string out_dir;
};

// A run config file is the trainer config plus an optional "paths" object.
TrainConfig load_run_config(const std::string& path, RunPaths* paths) {
  std::string text = read_file_text(path);
  json j = json::parse(text, nullptr, false);
  CSLID_CHECK(!j.is_discarded() && j.is_object(), ErrorKind::kConfig,
              path + ": config must be a JSON object");
  if (j.contains("paths")) {
    const json& p = j["paths"];
    CSLID_CHECK(p.is_object(), ErrorKind::kConfig,
                path + ": paths must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      const std::string& key = it.key();
      std::string* slot = nullptr;
      if (key == "en_manifest") slot = &paths->en_manifest;
      else if (key == "zh_manifest") slot = &paths->zh_manifest;
      else if (key == "in_domain") slot = &paths->in_domain;
      else if (key == "out_domain") slot = &paths->out_domain;
      else if (key == "lexicon_en") slot = &paths->lexicon_en;
      else if (key == "lexicon_zh") slot = &paths->lexicon_zh;
      else if (key == "features_dir") slot = &paths->features_dir;
      else if (key == "run_dir") slot = &paths->run_dir;
      else if (key == "model") slot = &paths->model;
      else if (key == "manifest") slot = &paths->manifest;
      else if (key == "out_dir") slot = &paths->out_dir;
      CSLID_CHECK(slot != nullptr, ErrorKind::kConfig,
                  path + ": unknown config key: paths." + key);
      CSLID_CHECK(it.value().is_string(), ErrorKind::kConfig,
                  path + ": paths." + key + " must be a string");
      *slot = it.value().get<std::string>();
    }
    j.erase("paths");
  }
  return parse_train_config(j.dump(), path);
}

void require_path(const std::string& value, const char* what) {
  CSLID_CHECK(!value.empty(), ErrorKind::kConfig,
              std::string("missing required path: ") + what);
}

TranscriptTokenizer load_tokenizer(const std::string& lexicon_en,
                                   const std::string& lexicon_zh) {
  TranscriptTokenizer tok;
  tok.en = load_lexicon(lexicon_en, Language::kEnglish);
  tok.zh = load_lexicon(lexicon_zh, Language::kMandarin);
  tok.vocab = build_vocab({tok.en, tok.zh});
  return tok;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out_dir;
  long n = 200;
  std::uint64_t seed = 17;
  bool seed_set = false;
  bool balance = false;
  bool force = false;
  double zh_fraction = 0.5;
  double min_dur = 1.6;
  double max_dur = 2.4;
  int sample_rate = 16000;
  std::vector<std::string> mix_from;
  double min_segment = 1.0;
  double max_segment = 5.0;
};

int run_synth(const SynthArgs& args) {
  CSLID_CHECK(!fs::exists(args.out_dir) || args.force, ErrorKind::kConfig,
              "output directory exists, pass --force to overwrite: " +
                  args.out_dir);
  std::uint64_t seed = args.seed;
  if (!args.seed_set) {
    std::uint64_t env = 0;
    if (env_seed(&env)) seed = env;
  }
  if (!args.mix_from.empty()) {
    // Silver code-mix synthesis from existing monolingual manifests.
    Manifest pool;
    for (const std::string& path : args.mix_from) {
      Manifest m = load_manifest(path);
      pool.utterances.insert(pool.utterances.end(), m.utterances.begin(),
                             m.utterances.end());
    }
    CodemixConfig cfg;
    cfg.min_segment_s = args.min_segment;
    cfg.max_segment_s = args.max_segment;
    Rng rng(seed);
    Manifest mixed = synthesize_codemix(pool, cfg, rng);
    fs::create_directories(args.out_dir);
    std::string path = (fs::path(args.out_dir) / "codemix.jsonl").string();
    save_manifest(path, mixed);
    std::cout << "wrote " << mixed.utterances.size()
              << " code-mix segments to " << path << "\n";
    return 0;
  }
  SynthesisConfig cfg;
  cfg.num_utterances = args.n;
  cfg.min_duration_s = args.min_dur;
  cfg.max_duration_s = args.max_dur;
  cfg.sample_rate_hz = args.sample_rate;
  cfg.balance_duration = args.balance;
  cfg.zh_fraction = args.zh_fraction;
  cfg.seed = seed;
  SynthesisResult result = generate_corpus(cfg, args.out_dir);
  std::cout << "wrote " << result.manifest.utterances.size()
            << " utterances to " << result.manifest_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// features

struct FeatureArgs {
  std::string config;
  std::string manifest;
  std::string out_dir;
};

int run_features(const FeatureArgs& args) {
  RunPaths paths;
  TrainConfig config;
  if (!args.config.empty()) config = load_run_config(args.config, &paths);
  if (!args.manifest.empty()) paths.manifest = args.manifest;
  if (!args.out_dir.empty()) paths.out_dir = args.out_dir;
  require_path(paths.manifest, "manifest");
  require_path(paths.out_dir, "out_dir");

  Manifest manifest = load_manifest(paths.manifest);
  FeatureSource features(config.fbank);
  fs::create_directories(paths.out_dir);
  for (const Utterance& utt : manifest.utterances) {
    std::string path =
        (fs::path(paths.out_dir) / (utt.id + ".fbnk")).string();
    write_features(path, features.get(utt));
  }
  std::cout << "wrote " << manifest.utterances.size() << " feature files to "
            << paths.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pretrain / finetune shared flags

struct TrainArgs {
  std::string config;
  RunPaths paths;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string model;
  long pretrain_epochs = -1;
  long finetune_epochs = -1;
  double pretrain_lr = -1.0;
  double finetune_lr = -1.0;
  double max_batch_duration = -1.0;
  double stop_at_bac = -1.0;
  std::string ft_method;
  std::string init_ckpt;
  std::string scale;
};

TrainConfig resolve_train_config(TrainArgs* args) {
  RunPaths file_paths;
  TrainConfig config;
  if (!args->config.empty()) config = load_run_config(args->config, &file_paths);
  // Flags win over the file; file paths fill unset flags.
  RunPaths& p = args->paths;
  if (p.en_manifest.empty()) p.en_manifest = file_paths.en_manifest;
  if (p.zh_manifest.empty()) p.zh_manifest = file_paths.zh_manifest;
  if (p.in_domain.empty()) p.in_domain = file_paths.in_domain;
  if (p.out_domain.empty()) p.out_domain = file_paths.out_domain;
  if (p.lexicon_en.empty()) p.lexicon_en = file_paths.lexicon_en;
  if (p.lexicon_zh.empty()) p.lexicon_zh = file_paths.lexicon_zh;
  if (p.features_dir.empty()) p.features_dir = file_paths.features_dir;
  if (p.run_dir.empty()) p.run_dir = file_paths.run_dir;
  if (p.model.empty()) p.model = file_paths.model;

  if (!args->model.empty()) config.model_kind = args->model;
  if (!args->scale.empty()) {
    CSLID_CHECK(args->scale == "desk" || args->scale == "full",
                ErrorKind::kConfig, "scale must be \"desk\" or \"full\"");
    if (args->scale == "desk") {
      double dropout = config.crnn.dropout;
      config.crnn = CrnnConfig::desk_scale();
      config.crnn.dropout = dropout;
      long vocab = config.mtl.vocab_size;
      double mtl_dropout = config.mtl.dropout;
      config.mtl = MtlConfig::desk_scale(vocab);
      config.mtl.dropout = mtl_dropout;
    }
  }
  if (args->pretrain_epochs >= 0) config.pretrain_epochs = args->pretrain_epochs;
  if (args->finetune_epochs >= 0) config.finetune_epochs = args->finetune_epochs;
  if (args->pretrain_lr >= 0.0) config.pretrain_lr = args->pretrain_lr;
  if (args->finetune_lr >= 0.0) config.finetune_lr = args->finetune_lr;
  if (args->max_batch_duration >= 0.0)
    config.max_batch_duration_s = args->max_batch_duration;
  if (args->stop_at_bac >= 0.0) config.stop_at_bac = args->stop_at_bac;
  if (!args->ft_method.empty())
    config.ft_method = parse_ft_method(args->ft_method);
  if (args->seed_set) {
    config.seed = args->seed;
  } else {
    std::uint64_t env = 0;
    if (env_seed(&env)) config.seed = env;
  }
  CSLID_CHECK(config.model_kind == "crnn" || config.model_kind == "mtl",
              ErrorKind::kConfig, "model must be \"crnn\" or \"mtl\"");
  return config;
}

int run_pretrain(TrainArgs* args) {
  TrainConfig config = resolve_train_config(args);
  const RunPaths& p = args->paths;
  require_path(p.en_manifest, "en_manifest");
  require_path(p.zh_manifest, "zh_manifest");
  require_path(p.run_dir, "run_dir");
  bool need_lexicons = config.model_kind == "mtl";
  if (need_lexicons) {
    require_path(p.lexicon_en, "lexicon_en");
    require_path(p.lexicon_zh, "lexicon_zh");
  }
  Manifest en = load_manifest(p.en_manifest);
  Manifest zh = load_manifest(p.zh_manifest);
  FeatureSource features(config.fbank, p.features_dir);
  TranscriptTokenizer tokenizer;
  bool have_tokenizer = !p.lexicon_en.empty() && !p.lexicon_zh.empty();
  if (have_tokenizer) tokenizer = load_tokenizer(p.lexicon_en, p.lexicon_zh);
  PretrainResult result =
      pretrain(config, en, zh, features, have_tokenizer ? &tokenizer : nullptr,
               p.run_dir);
  std::cout << "pretrain done: best epoch " << result.best_epoch
            << " holdout_bac " << result.best_bac << "\n";
  std::cout << "best checkpoint: "
            << result.checkpoint_paths[static_cast<size_t>(result.best_epoch) -
                                       1]
            << "\n";
  return 0;
}

int run_finetune(TrainArgs* args) {
  TrainConfig config = resolve_train_config(args);
  const RunPaths& p = args->paths;
  require_path(p.in_domain, "in_domain");
  require_path(p.run_dir, "run_dir");
  bool needs_ood = config.ft_method != FtMethod::kOneStage;
  if (needs_ood) require_path(p.out_domain, "out_domain");
  Manifest in_domain = load_manifest(p.in_domain);
  Manifest out_domain;
  if (!p.out_domain.empty()) out_domain = load_manifest(p.out_domain);
  FeatureSource features(config.fbank, p.features_dir);
  Checkpoint init;
  bool have_init = !args->init_ckpt.empty();
  if (have_init) init = load_checkpoint(args->init_ckpt);
  FinetuneResult result = finetune(config, have_init ? &init : nullptr,
                                   in_domain, out_domain, features, p.run_dir);
  if (result.capped_stage) {
    std::cout << "warning: a schedule stage was capped by the out-of-domain "
                 "pool size\n";
  }
  std::cout << "finetune done: " << p.run_dir
            << "/checkpoints/finetune-final.ckpt\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvalArgs {
  std::string config;
  std::string model;
  std::string manifest;
  std::string out_dir;
  std::string features_dir;
};

int run_evaluate(const EvalArgs& args) {
  RunPaths paths;
  TrainConfig config;
  if (!args.config.empty()) config = load_run_config(args.config, &paths);
  if (!args.model.empty()) paths.model = args.model;
  if (!args.manifest.empty()) paths.manifest = args.manifest;
  if (!args.out_dir.empty()) paths.out_dir = args.out_dir;
  if (!args.features_dir.empty()) paths.features_dir = args.features_dir;
  require_path(paths.model, "model");
  require_path(paths.manifest, "manifest");
  require_path(paths.out_dir, "out_dir");

  Checkpoint ckpt = load_checkpoint(paths.model);
  AnyModel model = AnyModel::from_checkpoint(ckpt);
  Manifest manifest = load_manifest(paths.manifest);
  FeatureSource features(config.fbank, paths.features_dir);
  EvaluationOutput output = evaluate_model(model, manifest, features);
  fs::create_directories(paths.out_dir);
  save_report((fs::path(paths.out_dir) / "report.json").string(),
              output.report);
  save_trials((fs::path(paths.out_dir) / "trials.jsonl").string(),
              output.trials);
  std::cout << format_report(output.report) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// schedule-preview

struct PreviewArgs {
  std::string preset;
  std::string config;
  std::string in_domain;
  std::string out_domain;
};

int run_schedule_preview(const PreviewArgs& args) {
  if (!args.preset.empty()) {
    CSLID_CHECK(args.preset == "merlion-seame", ErrorKind::kConfig,
                "unknown preset: " + args.preset);
    std::vector<ScheduleStage> stages = merlion_seame_schedule();
    std::cout << format_schedule_table(stages, merlion_stats(), seame_stats());
    return 0;
  }
  CSLID_CHECK(!args.config.empty(), ErrorKind::kConfig,
              "schedule-preview needs --preset or --config");
  RunPaths paths;
  TrainConfig config = load_run_config(args.config, &paths);
  if (!args.in_domain.empty()) paths.in_domain = args.in_domain;
  if (!args.out_domain.empty()) paths.out_domain = args.out_domain;
  require_path(paths.in_domain, "in_domain");
  require_path(paths.out_domain, "out_domain");
  CSLID_CHECK(!config.schedule.empty(), ErrorKind::kConfig,
              "config has no schedule to preview");
  CorpusStats in_stats = CorpusStats::of(load_manifest(paths.in_domain));
  CorpusStats out_stats = CorpusStats::of(load_manifest(paths.out_domain));
  std::vector<double> ratios;
  std::vector<long> factors;
  for (const ScheduleEntry& entry : config.schedule) {
    ratios.push_back(entry.ratio);
    factors.push_back(entry.upsample_zh);
  }
  std::vector<ScheduleStage> stages =
      build_gft_schedule(in_stats, out_stats, ratios, factors, 1);
  for (size_t k = 0; k < stages.size(); ++k) {
    stages[k].epochs = config.schedule[k].epochs;
  }
  std::cout << format_schedule_table(stages, in_stats, out_stats);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"code-switching language identification toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "generate a synthetic corpus or silver code-mix manifest");
  synth->add_option("--out", synth_args.out_dir, "output directory")
      ->required();
  synth->add_option("--n", synth_args.n, "number of utterances");
  CLI::Option* synth_seed =
      synth->add_option("--seed", synth_args.seed, "random seed");
  synth->add_flag("--balance", synth_args.balance,
                  "balance per-language duration instead of alternating");
  synth->add_flag("--force", synth_args.force,
                  "overwrite an existing output directory");
  synth->add_option("--zh-fraction", synth_args.zh_fraction,
                    "fraction of Mandarin utterances");
  synth->add_option("--min-dur", synth_args.min_dur,
                    "minimum utterance duration in seconds");
  synth->add_option("--max-dur", synth_args.max_dur,
                    "maximum utterance duration in seconds");
  synth->add_option("--sample-rate", synth_args.sample_rate,
                    "waveform sample rate in Hz");
  synth->add_option("--mix-from", synth_args.mix_from,
                    "source manifest for code-mix synthesis (repeatable)");
  synth->add_option("--min-segment", synth_args.min_segment,
                    "minimum code-mix cut length in seconds");
  synth->add_option("--max-segment", synth_args.max_segment,
                    "maximum code-mix cut length in seconds");

  FeatureArgs feature_args;
  CLI::App* features = app.add_subcommand(
      "features", "extract filterbank features for a manifest");
  features->add_option("--config", feature_args.config, "run config file");
  features->add_option("--manifest", feature_args.manifest, "input manifest");
  features->add_option("--out", feature_args.out_dir, "output directory");

  TrainArgs pretrain_args;
  CLI::App* pretrain_cmd = app.add_subcommand(
      "pretrain", "train a model on monolingual corpora with balanced batches");
  CLI::Option* pretrain_seed = nullptr;
  {
    CLI::App* c = pretrain_cmd;
    TrainArgs& a = pretrain_args;
    c->add_option("--config", a.config, "run config file");
    c->add_option("--en", a.paths.en_manifest, "English manifest");
    c->add_option("--zh", a.paths.zh_manifest, "Mandarin manifest");
    c->add_option("--lexicon-en", a.paths.lexicon_en, "English lexicon");
    c->add_option("--lexicon-zh", a.paths.lexicon_zh, "Mandarin lexicon");
    c->add_option("--features", a.paths.features_dir,
                  "precomputed feature directory");
    c->add_option("--run-dir", a.paths.run_dir, "run output directory");
    c->add_option("--model", a.model, "model kind: crnn or mtl");
    c->add_option("--scale", a.scale,
                  "model geometry preset, desk or full (wins over --config)");
    c->add_option("--pretrain-epochs", a.pretrain_epochs, "epoch count");
    c->add_option("--pretrain-lr", a.pretrain_lr, "learning rate");
    c->add_option("--max-batch-duration", a.max_batch_duration,
                  "batch duration cap in seconds");
    c->add_option("--stop-at-bac", a.stop_at_bac,
                  "stop once holdout balanced accuracy reaches this");
    pretrain_seed = c->add_option("--seed", a.seed, "random seed");
  }

  TrainArgs finetune_args;
  CLI::App* finetune_cmd = app.add_subcommand(
      "finetune", "fine-tune a model on in-domain data");
  CLI::Option* finetune_seed = nullptr;
  {
    CLI::App* c = finetune_cmd;
    TrainArgs& a = finetune_args;
    c->add_option("--config", a.config, "run config file");
    c->add_option("--init", a.init_ckpt,
                  "initial checkpoint (omit for random initialization)");
    c->add_option("--in-domain", a.paths.in_domain, "in-domain manifest");
    c->add_option("--out-domain", a.paths.out_domain, "out-of-domain manifest");
    c->add_option("--features", a.paths.features_dir,
                  "precomputed feature directory");
    c->add_option("--run-dir", a.paths.run_dir, "run output directory");
    c->add_option("--model", a.model, "model kind: crnn or mtl");
    c->add_option("--scale", a.scale,
                  "model geometry preset, desk or full (wins over --config)");
    c->add_option("--ft-method", a.ft_method,
                  "one_stage, combined, gradual, or two_stage");
    c->add_option("--finetune-epochs", a.finetune_epochs, "epoch count");
    c->add_option("--finetune-lr", a.finetune_lr, "learning rate");
    c->add_option("--max-batch-duration", a.max_batch_duration,
                  "batch duration cap in seconds");
    finetune_seed = c->add_option("--seed", a.seed, "random seed");
  }

  EvalArgs eval_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score a manifest with a trained checkpoint");
  evaluate->add_option("--config", eval_args.config, "run config file");
  evaluate->add_option("--model", eval_args.model, "checkpoint file");
  evaluate->add_option("--manifest", eval_args.manifest, "evaluation manifest");
  evaluate->add_option("--out", eval_args.out_dir, "output directory");
  evaluate->add_option("--features", eval_args.features_dir,
                       "precomputed feature directory");

  PreviewArgs preview_args;
  CLI::App* preview = app.add_subcommand(
      "schedule-preview", "print the realized gradual fine-tuning stage table");
  preview->add_option("--preset", preview_args.preset,
                      "built-in schedule preset (merlion-seame)");
  preview->add_option("--config", preview_args.config, "run config file");
  preview->add_option("--in-domain", preview_args.in_domain,
                      "in-domain manifest");
  preview->add_option("--out-domain", preview_args.out_domain,
                      "out-of-domain manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      synth_args.seed_set = synth_seed->count() > 0;
      return run_synth(synth_args);
    }
    if (features->parsed()) return run_features(feature_args);
    if (pretrain_cmd->parsed()) {
      pretrain_args.seed_set = pretrain_seed->count() > 0;
      return run_pretrain(&pretrain_args);
    }
    if (finetune_cmd->parsed()) {
      finetune_args.seed_set = finetune_seed->count() > 0;
      return run_finetune(&finetune_args);
    }
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (preview->parsed()) return run_schedule_preview(preview_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
