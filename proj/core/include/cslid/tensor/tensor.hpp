// core/include/cslid/tensor/tensor.hpp

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

#ifndef CSLID_TENSOR_TENSOR_HPP_
#define CSLID_TENSOR_TENSOR_HPP_

#include <numeric>
#include <string>
#include <vector>

#include "cslid/common/error.hpp"
#include "cslid/common/rng.hpp"

namespace cslid {

// Dense row-major tensor.  Rank is the shape length; scalars use shape {1}.
template <typename S>
struct Tensor {
  std::vector<long> shape;
  std::vector<S> values;

  Tensor() = default;
  explicit Tensor(std::vector<long> dims) : shape(std::move(dims)) {
    values.assign(static_cast<size_t>(numel_of(shape)), S(0));
  }

  static long numel_of(const std::vector<long>& dims) {
    long n = 1;
    for (long d : dims) {
      CSLID_CHECK(d >= 0, ErrorKind::kShape, "negative dimension");
      n *= d;
    }
    return n;
  }

  long numel() const { return static_cast<long>(values.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  long dim(int i) const { return shape[static_cast<size_t>(i)]; }

  long rows() const {
    CSLID_CHECK(rank() == 2, ErrorKind::kShape, "rows: tensor is not rank 2");
    return shape[0];
  }
  long cols() const {
    CSLID_CHECK(rank() == 2, ErrorKind::kShape, "cols: tensor is not rank 2");
    return shape[1];
  }

  S& at(long i, long j) { return values[static_cast<size_t>(i * cols() + j)]; }
  S at(long i, long j) const {
    return values[static_cast<size_t>(i * cols() + j)];
  }

  static Tensor zeros(std::vector<long> dims) { return Tensor(std::move(dims)); }

  static Tensor full(std::vector<long> dims, S value) {
    Tensor t(std::move(dims));
    std::fill(t.values.begin(), t.values.end(), value);
    return t;
  }

  static Tensor from(std::vector<long> dims, std::vector<S> data) {
    Tensor t;
    t.shape = std::move(dims);
    CSLID_CHECK(static_cast<long>(data.size()) == numel_of(t.shape),
                ErrorKind::kShape, "from: data size does not match shape");
    t.values = std::move(data);
    return t;
  }

  static Tensor randn(std::vector<long> dims, Rng& rng, S stddev = S(1)) {
    Tensor t(std::move(dims));
    for (auto& v : t.values) v = static_cast<S>(rng.normal()) * stddev;
    return t;
  }

  static Tensor uniform(std::vector<long> dims, Rng& rng, S lo, S hi) {
    Tensor t(std::move(dims));
    for (auto& v : t.values) {
      v = static_cast<S>(rng.uniform(static_cast<double>(lo),
                                     static_cast<double>(hi)));
    }
    return t;
  }
};

inline std::string shape_string(const std::vector<long>& dims) {
  std::string s = "[";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

inline bool same_shape(const std::vector<long>& a,
                       const std::vector<long>& b) {
  return a == b;
}

// Trainable value: the tensor, its accumulated gradient, and a name used in
// checkpoints and optimizer diagnostics.
template <typename S>
struct Parameter {
  std::string name;
  Tensor<S> value;
  std::vector<S> grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Tensor<S> v)
      : name(std::move(n)), value(std::move(v)) {
    grad.assign(value.values.size(), S(0));
  }

  void zero_grad() { std::fill(grad.begin(), grad.end(), S(0)); }
  bool has_grad() const {
    for (S g : grad) {
      if (g != S(0)) return true;
    }
    return false;
  }
};

}  // namespace cslid

#endif  // CSLID_TENSOR_TENSOR_HPP_
