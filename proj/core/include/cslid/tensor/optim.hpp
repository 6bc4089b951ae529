// core/include/cslid/tensor/optim.hpp

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

#ifndef CSLID_TENSOR_OPTIM_HPP_
#define CSLID_TENSOR_OPTIM_HPP_

#include <cmath>
#include <vector>

#include "cslid/tensor/tensor.hpp"

namespace cslid {

// Scales all gradients so their joint L2 norm does not exceed max_norm.
// Returns the norm before clipping.
template <typename S>
double clip_global_norm(const std::vector<Parameter<S>*>& params,
                        double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) {
    for (S g : p->grad) sq += static_cast<double>(g) * g;
  }
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    S k = static_cast<S>(max_norm / norm);
    for (auto* p : params) {
      for (auto& g : p->grad) g *= k;
    }
  }
  return norm;
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction.  Only the parameters handed to the constructor
// are updated; anything else keeps its value and optimizer state does not
// exist for it, so excluded parameters stay bit-identical.
template <typename S>
class Adam {
 public:
  Adam(std::vector<Parameter<S>*> params, AdamConfig cfg)
      : cfg_(cfg) {
    for (auto* p : params) {
      CSLID_CHECK(p != nullptr, ErrorKind::kArgument,
                  "adam: null parameter registered");
      slots_.push_back(Slot{p, std::vector<S>(p->grad.size(), S(0)),
                            std::vector<S>(p->grad.size(), S(0))});
    }
  }

  void zero_grad() {
    for (auto& s : slots_) s.p->zero_grad();
  }

  // One update over all registered parameters.  A parameter whose gradient
  // buffer does not match its value size indicates a broken registration.
  void step() {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (auto& s : slots_) {
      Parameter<S>& p = *s.p;
      CSLID_CHECK(p.grad.size() == p.value.values.size(), ErrorKind::kState,
                  "adam: gradient buffer size mismatch for " + p.name);
      for (size_t i = 0; i < p.grad.size(); ++i) {
        double g = static_cast<double>(p.grad[i]);
        s.m[i] = static_cast<S>(cfg_.beta1 * s.m[i] + (1.0 - cfg_.beta1) * g);
        s.v[i] =
            static_cast<S>(cfg_.beta2 * s.v[i] + (1.0 - cfg_.beta2) * g * g);
        double mhat = s.m[i] / bc1;
        double vhat = s.v[i] / bc2;
        p.value.values[i] -=
            static_cast<S>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
      }
    }
  }

  long steps() const { return t_; }
  const std::vector<Parameter<S>*> registered() const {
    std::vector<Parameter<S>*> out;
    for (const auto& s : slots_) out.push_back(s.p);
    return out;
  }

 private:
  struct Slot {
    Parameter<S>* p;
    std::vector<S> m, v;
  };
  AdamConfig cfg_;
  std::vector<Slot> slots_;
  long t_ = 0;
};

}  // namespace cslid

#endif  // CSLID_TENSOR_OPTIM_HPP_
