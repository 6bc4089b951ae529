// core/include/cslid/models/crnn.hpp

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

#ifndef CSLID_MODELS_CRNN_HPP_
#define CSLID_MODELS_CRNN_HPP_

#include <string>
#include <utility>
#include <vector>

#include "cslid/corpus/manifest.hpp"
#include "cslid/dsp/fbank.hpp"
#include "cslid/models/checkpoint.hpp"
#include "cslid/models/config.hpp"
#include "cslid/tensor/ctc.hpp"
#include "cslid/tensor/rnn.hpp"

namespace cslid {

// Residual convolution stages into a bidirectional GRU stack; the language
// logits come from the concatenated final forward and final backward state.
struct CrnnModel {
  CrnnConfig cfg;
  std::vector<ResidualBlock<float>> blocks;
  std::vector<BiGruLayer<float>> grus;
  LinearLayer<float> head;

  void init(const CrnnConfig& config, Rng& rng) {
    cfg = config;
    CSLID_CHECK(!cfg.channels.empty(), ErrorKind::kConfig,
                "crnn: at least one conv stage required");
    blocks.resize(cfg.channels.size());
    long c_in = 1;
    long freq = cfg.num_mels;
    for (size_t i = 0; i < cfg.channels.size(); ++i) {
      blocks[i].init("block" + std::to_string(i), c_in, cfg.channels[i], 2,
                     rng);
      c_in = cfg.channels[i];
      freq = (freq + 2 - 3) / 2 + 1;
    }
    grus.resize(static_cast<size_t>(cfg.gru_layers));
    long d = c_in * freq;
    for (long i = 0; i < cfg.gru_layers; ++i) {
      grus[static_cast<size_t>(i)].init("gru" + std::to_string(i), d,
                                        cfg.gru_hidden, rng);
      d = 2 * cfg.gru_hidden;
    }
    head.init("head", 2 * cfg.gru_hidden, 2, rng);
  }

  // Features arrive as [T x num_mels]; the result is a [1 x 2] logit row
  // (en, zh).  dropout_rng is only consulted when training.
  Var forward(Tape<float>& tp, const FeatureMatrix& features, bool training,
              Rng* dropout_rng) {
    CSLID_CHECK(features.bins == cfg.num_mels, ErrorKind::kShape,
                "crnn: feature bins do not match config");
    CSLID_CHECK(features.frames >= 1, ErrorKind::kShape,
                "crnn: empty feature matrix");
    Tensor<float> in({1, features.frames, features.bins});
    in.values = features.values;
    Var x = tp.input(std::move(in));
    for (auto& block : blocks) x = block.apply(tp, x, training);
    x = channels_to_cols(tp, x);
    for (auto& gru : grus) {
      x = gru.apply(tp, x);
      if (training && dropout_rng) {
        x = dropout(tp, x, cfg.dropout, *dropout_rng, true);
      }
    }
    long T = tp.val(x).rows();
    long H = cfg.gru_hidden;
    Var fwd_last = slice_cols(tp, slice_rows(tp, x, T - 1, T), 0, H);
    Var bwd_first = slice_cols(tp, slice_rows(tp, x, 0, 1), H, 2 * H);
    return head.apply(tp, concat_cols(tp, fwd_last, bwd_first));
  }

  std::vector<Parameter<float>*> params() {
    std::vector<Parameter<float>*> out;
    for (auto& b : blocks) {
      for (auto* p : b.params()) out.push_back(p);
    }
    for (auto& g : grus) {
      for (auto* p : g.params()) out.push_back(p);
    }
    for (auto* p : head.params()) out.push_back(p);
    return out;
  }

  // Batch-norm running statistics, saved alongside parameters.
  BufferList buffers() {
    BufferList out;
    for (size_t i = 0; i < blocks.size(); ++i) {
      std::string base = "block" + std::to_string(i);
      out.emplace_back(base + ".bn1.running_mean", &blocks[i].bn1.running_mean);
      out.emplace_back(base + ".bn1.running_var", &blocks[i].bn1.running_var);
      out.emplace_back(base + ".bn2.running_mean", &blocks[i].bn2.running_mean);
      out.emplace_back(base + ".bn2.running_var", &blocks[i].bn2.running_var);
    }
    return out;
  }

  // Softmax over the logits; ties resolve to English.  The returned score
  // is the Mandarin probability.
  std::pair<Language, double> predict(const FeatureMatrix& features) {
    Tape<float> tp;
    Var logits = forward(tp, features, false, nullptr);
    const auto& v = tp.val(logits).values;
    double m = std::max(v[0], v[1]);
    double pe = std::exp(v[0] - m), pz = std::exp(v[1] - m);
    double zh = pz / (pe + pz);
    return {zh > 0.5 ? Language::kMandarin : Language::kEnglish, zh};
  }

  Checkpoint to_checkpoint(int epoch, double metric) {
    Checkpoint ckpt;
    ckpt.kind = "crnn";
    ckpt.config_json = serialize_crnn_config(cfg);
    ckpt.epoch = epoch;
    ckpt.metric = metric;
    fill_checkpoint_tensors(ckpt, params(), buffers());
    return ckpt;
  }

  static CrnnModel from_checkpoint(const Checkpoint& ckpt) {
    CSLID_CHECK(ckpt.kind == "crnn", ErrorKind::kConfig,
                "crnn: checkpoint kind is \"" + ckpt.kind + "\"");
    CrnnModel model;
    Rng rng(0);  // values are overwritten below
    model.init(parse_crnn_config(ckpt.config_json), rng);
    restore_checkpoint_tensors(ckpt, model.params(), model.buffers());
    return model;
  }
};

}  // namespace cslid

#endif  // CSLID_MODELS_CRNN_HPP_
