// core/src/models/checkpoint.cpp

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

#include "cslid/models/checkpoint.hpp"

#include <cstring>

#include <json.hpp>

#include "cslid/common/error.hpp"
#include "cslid/common/io.hpp"

namespace cslid {

using json = nlohmann::json;

namespace {
constexpr uint32_t kFormatVersion = 1;
}

std::vector<uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.raw("CSLD", 4);
  w.u32(kFormatVersion);
  json header;
  header["kind"] = ckpt.kind;
  header["config"] = ckpt.config_json;
  header["epoch"] = ckpt.epoch;
  header["metric"] = ckpt.metric;
  w.str(header.dump());
  w.u32(static_cast<uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    w.str(t.name);
    w.u32(static_cast<uint32_t>(t.shape.size()));
    long numel = 1;
    for (long d : t.shape) {
      w.u64(static_cast<uint64_t>(d));
      numel *= d;
    }
    CSLID_CHECK(numel == static_cast<long>(t.values.size()),
                ErrorKind::kShape,
                "checkpoint: tensor " + t.name + " shape/data mismatch");
    for (float v : t.values) w.f32(v);
  }
  w.u32(crc32(w.bytes.data(), w.bytes.size()));
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes) {
  CSLID_CHECK(bytes.size() >= 12, ErrorKind::kIntegrity,
              "checkpoint: file too short");
  uint32_t stored_crc = static_cast<uint32_t>(bytes[bytes.size() - 4]) |
                        (static_cast<uint32_t>(bytes[bytes.size() - 3]) << 8) |
                        (static_cast<uint32_t>(bytes[bytes.size() - 2]) << 16) |
                        (static_cast<uint32_t>(bytes[bytes.size() - 1]) << 24);
  uint32_t actual_crc = crc32(bytes.data(), bytes.size() - 4);
  CSLID_CHECK(stored_crc == actual_crc, ErrorKind::kIntegrity,
              "checkpoint: checksum mismatch");

  ByteReader r(bytes.data(), bytes.size());
  char magic[4];
  r.raw(magic, 4);
  CSLID_CHECK(std::memcmp(magic, "CSLD", 4) == 0, ErrorKind::kIntegrity,
              "checkpoint: bad magic");
  uint32_t version = r.u32();
  CSLID_CHECK(version == kFormatVersion, ErrorKind::kUnsupported,
              "checkpoint: format version " + std::to_string(version) +
                  " is not supported");

  Checkpoint ckpt;
  json header = json::parse(r.str(), nullptr, false);
  CSLID_CHECK(!header.is_discarded(), ErrorKind::kIntegrity,
              "checkpoint: corrupt header");
  try {
    ckpt.kind = header.at("kind").get<std::string>();
    ckpt.config_json = header.at("config").get<std::string>();
    ckpt.epoch = header.at("epoch").get<int>();
    ckpt.metric = header.at("metric").get<double>();
  } catch (const json::exception& e) {
    throw_error(ErrorKind::kIntegrity,
                std::string("checkpoint: header field missing: ") + e.what());
  }

  uint32_t count = r.u32();
  ckpt.tensors.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor& t = ckpt.tensors[i];
    t.name = r.str();
    uint32_t rank = r.u32();
    long numel = 1;
    t.shape.resize(rank);
    for (uint32_t d = 0; d < rank; ++d) {
      t.shape[d] = static_cast<long>(r.u64());
      numel *= t.shape[d];
    }
    CSLID_CHECK(numel >= 0, ErrorKind::kIntegrity,
                "checkpoint: negative tensor size");
    t.values.resize(static_cast<size_t>(numel));
    for (long k = 0; k < numel; ++k) t.values[k] = r.f32();
  }
  CSLID_CHECK(r.remaining() == 4, ErrorKind::kIntegrity,
              "checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file_bytes(path));
}

Checkpoint load_checkpoint_expect(const std::string& path,
                                  const std::string& kind) {
  Checkpoint ckpt = load_checkpoint(path);
  CSLID_CHECK(ckpt.kind == kind, ErrorKind::kConfig,
              "checkpoint: expected kind \"" + kind + "\" but file holds \"" +
                  ckpt.kind + "\"");
  return ckpt;
}

void fill_checkpoint_tensors(Checkpoint& ckpt,
                             const std::vector<Parameter<float>*>& params,
                             const BufferList& buffers) {
  for (const auto* p : params) {
    ckpt.tensors.push_back(
        NamedTensor{p->name, p->value.shape, p->value.values});
  }
  for (const auto& [name, buf] : buffers) {
    ckpt.tensors.push_back(
        NamedTensor{name, {static_cast<long>(buf->size())}, *buf});
  }
}

void restore_checkpoint_tensors(const Checkpoint& ckpt,
                                const std::vector<Parameter<float>*>& params,
                                const BufferList& buffers) {
  size_t idx = 0;
  auto next = [&](const std::string& name,
                  size_t numel) -> const std::vector<float>& {
    CSLID_CHECK(idx < ckpt.tensors.size(), ErrorKind::kConfig,
                "checkpoint: missing tensor " + name);
    const NamedTensor& t = ckpt.tensors[idx++];
    CSLID_CHECK(t.name == name, ErrorKind::kConfig,
                "checkpoint: expected tensor " + name + " but found " +
                    t.name);
    CSLID_CHECK(t.values.size() == numel, ErrorKind::kConfig,
                "checkpoint: tensor " + name + " has wrong size");
    return t.values;
  };
  for (auto* p : params) {
    p->value.values = next(p->name, p->value.values.size());
  }
  for (const auto& [name, buf] : buffers) {
    *buf = next(name, buf->size());
  }
  CSLID_CHECK(idx == ckpt.tensors.size(), ErrorKind::kConfig,
              "checkpoint: unexpected extra tensors");
}

}  // namespace cslid
