// core/src/common/io.cpp

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

#include "cslid/common/io.hpp"

#include <array>
#include <fstream>

#include "cslid/common/error.hpp"

namespace cslid {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kDecode: return "decode error";
    case ErrorKind::kUnsupported: return "unsupported format";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kIntegrity: return "integrity error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kSchedule: return "schedule error";
    case ErrorKind::kInfeasible: return "infeasible target";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorKind::kIo, "cannot open " + path);
  in.seekg(0, std::ios::end);
  std::streamoff n = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> bytes(static_cast<size_t>(n));
  if (n > 0) in.read(reinterpret_cast<char*>(bytes.data()), n);
  if (!in) throw_error(ErrorKind::kIo, "short read on " + path);
  return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorKind::kIo, "cannot open " + path + " for write");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_error(ErrorKind::kIo, "short write on " + path);
}

std::string read_file_text(const std::string& path) {
  auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_file_text(const std::string& path, const std::string& text) {
  std::vector<uint8_t> bytes(text.begin(), text.end());
  write_file_bytes(path, bytes);
}

namespace {
std::array<uint32_t, 256> make_crc_table() {
  std::array<uint32_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}
}  // namespace

uint32_t crc32(const uint8_t* data, size_t n, uint32_t seed) {
  static const std::array<uint32_t, 256> table = make_crc_table();
  uint32_t c = seed ^ 0xFFFFFFFFu;
  for (size_t i = 0; i < n; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void ByteReader::raw(void* out, size_t n) {
  if (pos_ + n > n_)
    throw_error(ErrorKind::kIntegrity, "truncated input, needed " +
                                           std::to_string(n) + " bytes at offset " +
                                           std::to_string(pos_));
  std::memcpy(out, data_ + pos_, n);
  pos_ += n;
}

uint32_t ByteReader::u32() {
  uint32_t v;
  raw(&v, 4);
  return v;
}

uint64_t ByteReader::u64() {
  uint64_t v;
  raw(&v, 8);
  return v;
}

float ByteReader::f32() {
  float v;
  raw(&v, 4);
  return v;
}

std::string ByteReader::str() {
  uint32_t n = u32();
  if (n > remaining())
    throw_error(ErrorKind::kIntegrity, "truncated string of length " + std::to_string(n));
  std::string s(n, '\0');
  raw(s.data(), n);
  return s;
}

}  // namespace cslid
