// core/include/cslid/tensor/gradcheck.hpp

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

#ifndef CSLID_TENSOR_GRADCHECK_HPP_
#define CSLID_TENSOR_GRADCHECK_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include "cslid/tensor/tensor.hpp"

namespace cslid {

// Central-difference comparison of analytic gradients.
//
// loss_fn(with_grad) must rebuild the computation from the current
// parameter values and return the scalar loss; when with_grad is true it
// must also accumulate gradients into each parameter (grads are zeroed here
// beforehand).  Returns the largest relative error
//   |fd - analytic| / max(1, |fd| + |analytic|)
// over every coordinate of every parameter.  Double precision inputs keep
// the difference quotient meaningful at the default epsilon.
template <typename S>
double finite_diff_check(const std::vector<Parameter<S>*>& params,
                         const std::function<S(bool with_grad)>& loss_fn,
                         S eps = S(1e-5)) {
  for (auto* p : params) p->zero_grad();
  loss_fn(true);

  double worst = 0.0;
  for (auto* p : params) {
    for (size_t i = 0; i < p->value.values.size(); ++i) {
      S saved = p->value.values[i];
      p->value.values[i] = saved + eps;
      double f_plus = static_cast<double>(loss_fn(false));
      p->value.values[i] = saved - eps;
      double f_minus = static_cast<double>(loss_fn(false));
      p->value.values[i] = saved;

      double fd = (f_plus - f_minus) / (2.0 * static_cast<double>(eps));
      double an = static_cast<double>(p->grad[i]);
      double rel =
          std::abs(fd - an) / std::max(1.0, std::abs(fd) + std::abs(an));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace cslid

#endif  // CSLID_TENSOR_GRADCHECK_HPP_
