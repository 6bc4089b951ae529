// core/include/cslid/common/error.hpp

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

#ifndef CSLID_COMMON_ERROR_HPP_
#define CSLID_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace cslid {

// Every failure the library reports carries a category so callers (the CLI
// in particular) can map it to an exit code without string matching.
enum class ErrorKind {
  kArgument,      // caller passed an invalid value
  kConfig,        // bad run configuration / unknown key / mismatched model
  kDecode,        // malformed input container
  kUnsupported,   // well-formed but unsupported encoding
  kParse,         // schema violation in a text input
  kIntegrity,     // duplicate ids, checksum mismatch, truncated file
  kShape,         // tensor shape disagreement
  kSchedule,      // invalid fine-tuning schedule
  kInfeasible,    // CTC target cannot be aligned in the given frames
  kState,         // object used before required state was populated
  kIo,            // filesystem failure
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

#define CSLID_CHECK(cond, kind, msg)            \
  do {                                          \
    if (!(cond)) ::cslid::throw_error(kind, msg); \
  } while (0)

}  // namespace cslid

#endif  // CSLID_COMMON_ERROR_HPP_
