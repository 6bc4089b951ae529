// core/include/cslid/models/mtl.hpp

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

#ifndef CSLID_MODELS_MTL_HPP_
#define CSLID_MODELS_MTL_HPP_

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

// Joint objective: (1 - lambda) * ctc + lambda * alpha * lid.  alpha
// compensates for the magnitude gap between the sequence loss and the
// single-label loss.
template <typename S>
Var joint_loss(Tape<S>& tp, Var ctc, Var lid, double lambda, double alpha) {
  CSLID_CHECK(0.0 <= lambda && lambda <= 1.0, ErrorKind::kConfig,
              "joint_loss: lambda must lie in [0, 1]");
  return add(tp, scale(tp, ctc, static_cast<S>(1.0 - lambda)),
             scale(tp, lid, static_cast<S>(lambda * alpha)));
}

// Conformer-style encoder block: macaron feed-forward halves around
// self-attention and a depthwise convolution module, each residual, with a
// closing layer norm.
template <typename S>
struct ConformerBlock {
  LayerNorm<S> ln_ff1, ln_attn, ln_conv, ln_ff2, ln_out;
  LinearLayer<S> ff1_in, ff1_out, ff2_in, ff2_out;
  MultiHeadSelfAttention<S> attn;
  DepthwiseConv1d<S> dwconv;
  double dropout_rate = 0.1;

  void init(const std::string& name, long d, long heads, long ffn_expansion,
            long conv_kernel, double dropout, Rng& rng) {
    dropout_rate = dropout;
    ln_ff1.init(name + ".ln_ff1", d);
    ff1_in.init(name + ".ff1_in", d, d * ffn_expansion, rng);
    ff1_out.init(name + ".ff1_out", d * ffn_expansion, d, rng);
    ln_attn.init(name + ".ln_attn", d);
    attn.init(name + ".attn", d, heads, rng);
    ln_conv.init(name + ".ln_conv", d);
    dwconv.init(name + ".dwconv", d, conv_kernel, rng);
    ln_ff2.init(name + ".ln_ff2", d);
    ff2_in.init(name + ".ff2_in", d, d * ffn_expansion, rng);
    ff2_out.init(name + ".ff2_out", d * ffn_expansion, d, rng);
    ln_out.init(name + ".ln_out", d);
  }

  Var apply(Tape<S>& tp, Var x, bool training, Rng* rng) {
    auto drop = [&](Var v) {
      return training && rng ? dropout(tp, v, dropout_rate, *rng, true) : v;
    };
    Var h = ff1_out.apply(tp, relu(tp, ff1_in.apply(tp, ln_ff1.apply(tp, x))));
    x = add(tp, x, scale(tp, drop(h), S(0.5)));
    x = add(tp, x, drop(attn.apply(tp, ln_attn.apply(tp, x))));
    x = add(tp, x, drop(relu(tp, dwconv.apply(tp, ln_conv.apply(tp, x)))));
    h = ff2_out.apply(tp, relu(tp, ff2_in.apply(tp, ln_ff2.apply(tp, x))));
    x = add(tp, x, scale(tp, drop(h), S(0.5)));
    return ln_out.apply(tp, x);
  }

  std::vector<Parameter<S>*> params() {
    std::vector<Parameter<S>*> out;
    auto take = [&out](std::vector<Parameter<S>*> ps) {
      out.insert(out.end(), ps.begin(), ps.end());
    };
    take(ln_ff1.params());
    take(ff1_in.params());
    take(ff1_out.params());
    take(ln_attn.params());
    take(attn.params());
    take(ln_conv.params());
    take(dwconv.params());
    take(ln_ff2.params());
    take(ff2_in.params());
    take(ff2_out.params());
    take(ln_out.params());
    return out;
  }
};

// Shared encoder with a frame-level phoneme head (CTC) and an
// utterance-level language head (LSTM final state into a classifier).
struct MtlModel {
  MtlConfig cfg;
  LinearLayer<float> frontend;
  std::vector<ConformerBlock<float>> conformer_blocks;
  std::vector<GruLayer<float>> gru_blocks;
  LinearLayer<float> ctc_head;
  LstmLayer<float> lid_lstm;
  LinearLayer<float> lid_head;

  struct Output {
    Var ctc_log_probs;  // [T x vocab]
    Var lid_logits;     // [1 x 2]
  };

  void init(const MtlConfig& config, Rng& rng) {
    cfg = config;
    CSLID_CHECK(cfg.vocab_size >= 2, ErrorKind::kConfig,
                "mtl: vocab_size must cover blank and at least one symbol");
    frontend.init("frontend", cfg.num_mels, cfg.d_model, rng);
    if (cfg.encoder == "conformer") {
      conformer_blocks.resize(static_cast<size_t>(cfg.num_blocks));
      for (long i = 0; i < cfg.num_blocks; ++i) {
        conformer_blocks[static_cast<size_t>(i)].init(
            "enc" + std::to_string(i), cfg.d_model, cfg.heads,
            cfg.ffn_expansion, cfg.conv_kernel, cfg.dropout, rng);
      }
    } else {
      gru_blocks.resize(static_cast<size_t>(cfg.num_blocks));
      for (long i = 0; i < cfg.num_blocks; ++i) {
        gru_blocks[static_cast<size_t>(i)].init("enc" + std::to_string(i),
                                                cfg.d_model, cfg.d_model, rng);
      }
    }
    ctc_head.init("ctc_head", cfg.d_model, cfg.vocab_size, rng);
    lid_lstm.init("lid_lstm", cfg.d_model, cfg.lid_hidden, rng);
    lid_head.init("lid_head", cfg.lid_hidden, 2, rng);
  }

  Var encode(Tape<float>& tp, const FeatureMatrix& features, bool training,
             Rng* rng) {
    CSLID_CHECK(features.bins == cfg.num_mels, ErrorKind::kShape,
                "mtl: feature bins do not match config");
    CSLID_CHECK(features.frames >= 1, ErrorKind::kShape,
                "mtl: empty feature matrix");
    Tensor<float> in({features.frames, features.bins});
    in.values = features.values;
    Var x = frontend.apply(tp, tp.input(std::move(in)));
    if (cfg.encoder == "conformer") {
      for (auto& block : conformer_blocks) {
        x = block.apply(tp, x, training, rng);
      }
    } else {
      for (auto& block : gru_blocks) {
        x = block.apply(tp, x);
        if (training && rng) x = dropout(tp, x, cfg.dropout, *rng, true);
      }
    }
    return x;
  }

  Output forward(Tape<float>& tp, const FeatureMatrix& features, bool training,
                 Rng* rng) {
    Var enc = encode(tp, features, training, rng);
    Output out;
    out.ctc_log_probs = log_softmax_rows(tp, ctc_head.apply(tp, enc));
    Var states = lid_lstm.apply(tp, enc);
    long T = tp.val(states).rows();
    out.lid_logits = lid_head.apply(tp, slice_rows(tp, states, T - 1, T));
    return out;
  }

  // Parameters on the language path only: encoder front end and blocks stay
  // shared, but a fine-tune pass that should leave the phoneme head intact
  // registers just these with the optimizer.
  std::vector<Parameter<float>*> lid_params() {
    std::vector<Parameter<float>*> out = lid_lstm.params();
    for (auto* p : lid_head.params()) out.push_back(p);
    return out;
  }

  // Everything except the phoneme head: what language-only fine-tuning
  // updates.  The excluded head gets no optimizer state, so its values stay
  // bit-identical through a fine-tune run.
  std::vector<Parameter<float>*> finetune_params() {
    std::vector<Parameter<float>*> out = frontend.params();
    for (auto& b : conformer_blocks) {
      for (auto* p : b.params()) out.push_back(p);
    }
    for (auto& b : gru_blocks) {
      for (auto* p : b.params()) out.push_back(p);
    }
    for (auto* p : lid_lstm.params()) out.push_back(p);
    for (auto* p : lid_head.params()) out.push_back(p);
    return out;
  }

  std::vector<Parameter<float>*> params() {
    std::vector<Parameter<float>*> out = frontend.params();
    for (auto& b : conformer_blocks) {
      for (auto* p : b.params()) out.push_back(p);
    }
    for (auto& b : gru_blocks) {
      for (auto* p : b.params()) out.push_back(p);
    }
    for (auto* p : ctc_head.params()) out.push_back(p);
    for (auto* p : lid_lstm.params()) out.push_back(p);
    for (auto* p : lid_head.params()) out.push_back(p);
    return out;
  }

  std::pair<Language, double> predict(const FeatureMatrix& features) {
    Tape<float> tp;
    Output out = forward(tp, features, false, nullptr);
    const auto& v = tp.val(out.lid_logits).values;
    double m = std::max(v[0], v[1]);
    double pe = std::exp(v[0] - m), pz = std::exp(v[1] - m);
    double zh = pz / (pe + pz);
    return {zh > 0.5 ? Language::kMandarin : Language::kEnglish, zh};
  }

  Checkpoint to_checkpoint(int epoch, double metric) {
    Checkpoint ckpt;
    ckpt.kind = "mtl";
    ckpt.config_json = serialize_mtl_config(cfg);
    ckpt.epoch = epoch;
    ckpt.metric = metric;
    fill_checkpoint_tensors(ckpt, params(), {});
    return ckpt;
  }

  static MtlModel from_checkpoint(const Checkpoint& ckpt) {
    CSLID_CHECK(ckpt.kind == "mtl", ErrorKind::kConfig,
                "mtl: checkpoint kind is \"" + ckpt.kind + "\"");
    MtlModel model;
    Rng rng(0);  // values are overwritten below
    model.init(parse_mtl_config(ckpt.config_json), rng);
    restore_checkpoint_tensors(ckpt, model.params(), {});
    return model;
  }
};

}  // namespace cslid

#endif  // CSLID_MODELS_MTL_HPP_
