// core/include/cslid/models/checkpoint.hpp

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

#ifndef CSLID_MODELS_CHECKPOINT_HPP_
#define CSLID_MODELS_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cslid/tensor/tensor.hpp"

namespace cslid {

struct NamedTensor {
  std::string name;
  std::vector<long> shape;
  std::vector<float> values;
};

// Model snapshot: kind tag, the config the model was built from, training
// position, the selection metric, and every parameter and buffer in a fixed
// order.
struct Checkpoint {
  std::string kind;
  std::string config_json;
  int epoch = 0;
  double metric = 0.0;
  std::vector<NamedTensor> tensors;
};

// Binary layout: "CSLD" magic, u32 format version, length-prefixed header
// JSON (kind, config, epoch, metric), u32 tensor count, then per tensor a
// length-prefixed name, u32 rank, u64 dims, float32 data, all little-endian,
// and a trailing CRC-32 over everything before it.
std::vector<uint8_t> encode_checkpoint(const Checkpoint& ckpt);

// The checksum is verified before anything else is parsed; corrupted or
// truncated files raise kIntegrity.
Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Loads and additionally requires the stored kind tag; a different kind
// raises kConfig.
Checkpoint load_checkpoint_expect(const std::string& path,
                                  const std::string& kind);

using BufferList = std::vector<std::pair<std::string, std::vector<float>*>>;

// Appends every parameter, then every buffer, in the given order.
void fill_checkpoint_tensors(Checkpoint& ckpt,
                             const std::vector<Parameter<float>*>& params,
                             const BufferList& buffers);

// Restores the same sequence; any name, size, or count mismatch raises
// kConfig since it means the checkpoint belongs to a different model build.
void restore_checkpoint_tensors(const Checkpoint& ckpt,
                                const std::vector<Parameter<float>*>& params,
                                const BufferList& buffers);

}  // namespace cslid

#endif  // CSLID_MODELS_CHECKPOINT_HPP_
