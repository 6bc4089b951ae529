// core/include/cslid/common/rng.hpp

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

#ifndef CSLID_COMMON_RNG_HPP_
#define CSLID_COMMON_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cslid {

// splitmix64 finalizer, used to derive child seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seeded random source with fully specified draw algorithms.  The standard
// <random> distributions are implementation defined, so every draw here is
// built directly on mt19937_64 output; identical seeds give identical
// streams on every platform.  Reproducibility of training runs depends on
// this, do not swap in std distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 significant bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive bounds.  Modulo bias is below 2^-50 for the ranges used here.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % span);
  }

  // Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (size_t i = v.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i)));
      std::swap(v[i], v[j]);
    }
  }

  // Deterministic child stream; fork(k) from the same parent seed always
  // yields the same child, independent of draws made on the parent.
  Rng fork(uint64_t stream_id) const {
    return Rng(mix64(seed_ ^ mix64(stream_id + 1)));
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cslid

#endif  // CSLID_COMMON_RNG_HPP_
