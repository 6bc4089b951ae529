// core/include/cslid/common/io.hpp

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

#ifndef CSLID_COMMON_IO_HPP_
#define CSLID_COMMON_IO_HPP_

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace cslid {

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes);
std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
uint32_t crc32(const uint8_t* data, size_t n, uint32_t seed = 0);

// Little-endian append/read helpers for the binary file formats.
struct ByteWriter {
  std::vector<uint8_t> bytes;

  void raw(const void* p, size_t n) {
    const uint8_t* b = static_cast<const uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
};

class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t n) : data_(data), n_(n) {}

  bool exhausted() const { return pos_ >= n_; }
  size_t remaining() const { return n_ - pos_; }

  void raw(void* out, size_t n);
  uint32_t u32();
  uint64_t u64();
  float f32();
  std::string str();

 private:
  const uint8_t* data_;
  size_t n_;
  size_t pos_ = 0;
};

}  // namespace cslid

#endif  // CSLID_COMMON_IO_HPP_
