// core/include/cslid/models/config.hpp

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

#ifndef CSLID_MODELS_CONFIG_HPP_
#define CSLID_MODELS_CONFIG_HPP_

#include <string>
#include <vector>

namespace cslid {

// Convolutional-recurrent language classifier.  The convolutional front end
// halves the mel axis per stage; the recurrent stack is bidirectional.
struct CrnnConfig {
  long num_mels = 80;
  std::vector<long> channels = {32, 64, 128};
  long gru_layers = 5;
  long gru_hidden = 512;
  double dropout = 0.1;

  // Shrunk geometry for fast single-core experiments.
  static CrnnConfig desk_scale();
};

std::string serialize_crnn_config(const CrnnConfig& cfg);
CrnnConfig parse_crnn_config(const std::string& text);

// Multitask model: a shared encoder feeding a frame-level phoneme head
// trained with CTC and an utterance-level language head.
struct MtlConfig {
  long num_mels = 80;
  std::string encoder = "conformer";  // "conformer" or "gru"
  long d_model = 144;
  long num_blocks = 4;
  long heads = 4;
  long ffn_expansion = 2;
  long conv_kernel = 15;
  long vocab_size = 0;
  long lid_hidden = 64;
  double lambda_lid = 0.2;   // interpolation weight on the language loss
  double alpha_lid = 100.0;  // loss scale compensating magnitude mismatch
  double dropout = 0.1;

  static MtlConfig desk_scale(long vocab_size);
};

std::string serialize_mtl_config(const MtlConfig& cfg);
MtlConfig parse_mtl_config(const std::string& text);

}  // namespace cslid

#endif  // CSLID_MODELS_CONFIG_HPP_
