// core/src/models/config.cpp

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

#include "cslid/models/config.hpp"

#include <json.hpp>

#include "cslid/common/error.hpp"

namespace cslid {

using json = nlohmann::json;

CrnnConfig CrnnConfig::desk_scale() {
  CrnnConfig cfg;
  cfg.channels = {8, 16, 32};
  cfg.gru_layers = 2;
  cfg.gru_hidden = 64;
  return cfg;
}

std::string serialize_crnn_config(const CrnnConfig& cfg) {
  json j;
  j["num_mels"] = cfg.num_mels;
  j["channels"] = cfg.channels;
  j["gru_layers"] = cfg.gru_layers;
  j["gru_hidden"] = cfg.gru_hidden;
  j["dropout"] = cfg.dropout;
  return j.dump();
}

CrnnConfig parse_crnn_config(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  CSLID_CHECK(!j.is_discarded(), ErrorKind::kParse,
              "crnn config: invalid JSON");
  CrnnConfig cfg;
  try {
    cfg.num_mels = j.at("num_mels").get<long>();
    cfg.channels = j.at("channels").get<std::vector<long>>();
    cfg.gru_layers = j.at("gru_layers").get<long>();
    cfg.gru_hidden = j.at("gru_hidden").get<long>();
    cfg.dropout = j.at("dropout").get<double>();
  } catch (const json::exception& e) {
    throw_error(ErrorKind::kParse, std::string("crnn config: ") + e.what());
  }
  return cfg;
}

MtlConfig MtlConfig::desk_scale(long vocab_size) {
  MtlConfig cfg;
  cfg.d_model = 48;
  cfg.num_blocks = 2;
  cfg.heads = 4;
  cfg.lid_hidden = 32;
  cfg.vocab_size = vocab_size;
  return cfg;
}

std::string serialize_mtl_config(const MtlConfig& cfg) {
  json j;
  j["num_mels"] = cfg.num_mels;
  j["encoder"] = cfg.encoder;
  j["d_model"] = cfg.d_model;
  j["num_blocks"] = cfg.num_blocks;
  j["heads"] = cfg.heads;
  j["ffn_expansion"] = cfg.ffn_expansion;
  j["conv_kernel"] = cfg.conv_kernel;
  j["vocab_size"] = cfg.vocab_size;
  j["lid_hidden"] = cfg.lid_hidden;
  j["lambda_lid"] = cfg.lambda_lid;
  j["alpha_lid"] = cfg.alpha_lid;
  j["dropout"] = cfg.dropout;
  return j.dump();
}

MtlConfig parse_mtl_config(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  CSLID_CHECK(!j.is_discarded(), ErrorKind::kParse, "mtl config: invalid JSON");
  MtlConfig cfg;
  try {
    cfg.num_mels = j.at("num_mels").get<long>();
    cfg.encoder = j.at("encoder").get<std::string>();
    cfg.d_model = j.at("d_model").get<long>();
    cfg.num_blocks = j.at("num_blocks").get<long>();
    cfg.heads = j.at("heads").get<long>();
    cfg.ffn_expansion = j.at("ffn_expansion").get<long>();
    cfg.conv_kernel = j.at("conv_kernel").get<long>();
    cfg.vocab_size = j.at("vocab_size").get<long>();
    cfg.lid_hidden = j.at("lid_hidden").get<long>();
    cfg.lambda_lid = j.at("lambda_lid").get<double>();
    cfg.alpha_lid = j.at("alpha_lid").get<double>();
    cfg.dropout = j.at("dropout").get<double>();
  } catch (const json::exception& e) {
    throw_error(ErrorKind::kParse, std::string("mtl config: ") + e.what());
  }
  CSLID_CHECK(cfg.encoder == "conformer" || cfg.encoder == "gru",
              ErrorKind::kConfig,
              "mtl config: encoder must be \"conformer\" or \"gru\"");
  return cfg;
}

}  // namespace cslid
