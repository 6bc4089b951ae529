// core/include/cslid/common/utf8.hpp

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

#ifndef CSLID_COMMON_UTF8_HPP_
#define CSLID_COMMON_UTF8_HPP_

#include <string>
#include <vector>

namespace cslid {

// Splits a UTF-8 string into one std::string per code point.  Invalid bytes
// are passed through as single-byte units rather than rejected; transcripts
// come from third-party corpora and must survive round trips unchanged.
std::vector<std::string> utf8_codepoints(const std::string& s);

size_t utf8_length(const std::string& s);

}  // namespace cslid

#endif  // CSLID_COMMON_UTF8_HPP_
