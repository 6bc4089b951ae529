// core/include/cslid/tensor/ctc.hpp

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

#ifndef CSLID_TENSOR_CTC_HPP_
#define CSLID_TENSOR_CTC_HPP_

#include <limits>
#include <memory>
#include <vector>

#include "cslid/tensor/tape.hpp"

namespace cslid {

namespace detail {

template <typename S>
constexpr S neg_inf() {
  return -std::numeric_limits<S>::infinity();
}

template <typename S>
S logsumexp2(S a, S b) {
  if (a == neg_inf<S>()) return b;
  if (b == neg_inf<S>()) return a;
  S m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

template <typename S>
S logsumexp3(S a, S b, S c) {
  return logsumexp2(logsumexp2(a, b), c);
}

// Blank-augmented target: blank, t1, blank, t2, ..., blank.
inline std::vector<int> extend_target(const std::vector<int>& target,
                                      int blank) {
  std::vector<int> ext(2 * target.size() + 1, blank);
  for (size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  return ext;
}

template <typename S>
void check_ctc_args(const Tensor<S>& lp, const std::vector<int>& target,
                    int blank) {
  CSLID_CHECK(lp.rank() == 2, ErrorKind::kShape,
              "ctc: log probs must be [T x V]");
  const long T = lp.rows(), V = lp.cols();
  CSLID_CHECK(T > 0 && V > 0, ErrorKind::kShape, "ctc: empty input");
  CSLID_CHECK(0 <= blank && blank < V, ErrorKind::kArgument,
              "ctc: blank index out of range");
  long repeats = 0;
  for (size_t i = 0; i < target.size(); ++i) {
    CSLID_CHECK(0 <= target[i] && target[i] < V, ErrorKind::kArgument,
                "ctc: target symbol out of range");
    CSLID_CHECK(target[i] != blank, ErrorKind::kArgument,
                "ctc: target may not contain the blank");
    if (i > 0 && target[i] == target[i - 1]) ++repeats;
  }
  CSLID_CHECK(T >= static_cast<long>(target.size()) + repeats,
              ErrorKind::kInfeasible,
              "ctc: " + std::to_string(T) + " frames cannot emit " +
                  std::to_string(target.size()) + " labels with " +
                  std::to_string(repeats) + " repeats");
}

// Forward pass over the extended-target lattice.  alpha[t][s] includes the
// emission at frame t; returns log P(target | log_probs).
template <typename S>
S ctc_alpha(const Tensor<S>& lp, const std::vector<int>& ext,
            std::vector<S>* alpha_out) {
  const long T = lp.rows(), V = lp.cols();
  const long n = static_cast<long>(ext.size());
  std::vector<S> alpha(static_cast<size_t>(T * n), neg_inf<S>());

  alpha[0] = lp.values[ext[0]];
  if (n > 1) alpha[1] = lp.values[ext[1]];
  for (long t = 1; t < T; ++t) {
    for (long s = 0; s < n; ++s) {
      S best = alpha[(t - 1) * n + s];
      if (s >= 1) best = logsumexp2(best, alpha[(t - 1) * n + s - 1]);
      if (s >= 2 && ext[s] != ext[0] /* blank */ && ext[s] != ext[s - 2]) {
        best = logsumexp2(best, alpha[(t - 1) * n + s - 2]);
      }
      if (best != neg_inf<S>()) {
        alpha[t * n + s] = best + lp.values[t * V + ext[s]];
      }
    }
  }
  S logp = alpha[(T - 1) * n + n - 1];
  if (n > 1) logp = logsumexp2(logp, alpha[(T - 1) * n + n - 2]);
  if (alpha_out) *alpha_out = std::move(alpha);
  return logp;
}

// Backward lattice pass; beta[t][s] excludes the emission at frame t.
template <typename S>
std::vector<S> ctc_beta(const Tensor<S>& lp, const std::vector<int>& ext) {
  const long T = lp.rows(), V = lp.cols();
  const long n = static_cast<long>(ext.size());
  std::vector<S> beta(static_cast<size_t>(T * n), neg_inf<S>());
  beta[(T - 1) * n + n - 1] = S(0);
  if (n > 1) beta[(T - 1) * n + n - 2] = S(0);
  for (long t = T - 2; t >= 0; --t) {
    for (long s = 0; s < n; ++s) {
      S acc = beta[(t + 1) * n + s] + lp.values[(t + 1) * V + ext[s]];
      if (s + 1 < n) {
        acc = logsumexp2(
            acc, beta[(t + 1) * n + s + 1] + lp.values[(t + 1) * V + ext[s + 1]]);
      }
      if (s + 2 < n && ext[s + 2] != ext[0] /* blank */ && ext[s + 2] != ext[s]) {
        acc = logsumexp2(
            acc, beta[(t + 1) * n + s + 2] + lp.values[(t + 1) * V + ext[s + 2]]);
      }
      beta[t * n + s] = acc;
    }
  }
  return beta;
}

}  // namespace detail

// Negative log probability of the target under frame log posteriors
// [T x V].  Targets longer than the frame count (counting the extra frame
// each repeated label needs) raise kInfeasible.
template <typename S>
S ctc_loss_value(const Tensor<S>& log_probs, const std::vector<int>& target,
                 int blank = 0) {
  detail::check_ctc_args(log_probs, target, blank);
  std::vector<int> ext = detail::extend_target(target, blank);
  return -detail::ctc_alpha<S>(log_probs, ext, nullptr);
}

// Tape node for the CTC loss.  The gradient with respect to the input log
// probabilities is minus the posterior state occupancy
//   d(-log P)/d lp[t][k] = -exp(LSE_{s: ext(s)=k}(alpha[t][s] + beta[t][s])
//                               - log P).
template <typename S>
Var ctc_loss(Tape<S>& tp, Var log_probs, const std::vector<int>& target,
             int blank = 0) {
  const Tensor<S>& lp = tp.val(log_probs);
  detail::check_ctc_args(lp, target, blank);
  auto ext = std::make_shared<std::vector<int>>(
      detail::extend_target(target, blank));

  auto alpha = std::make_shared<std::vector<S>>();
  S logp = detail::ctc_alpha<S>(lp, *ext, alpha.get());
  const long T = lp.rows(), V = lp.cols();

  int out_id = static_cast<int>(tp.size());
  return tp.node(
      Tensor<S>::from({1}, {-logp}),
      [&tp, log_probs, ext, alpha, logp, T, V, out_id]() {
        S g = tp.grad(Var{out_id})[0];
        const Tensor<S>& lp = tp.val(log_probs);
        std::vector<S> beta = detail::ctc_beta<S>(lp, *ext);
        const long n = static_cast<long>(ext->size());
        auto& ga = tp.grad(log_probs);
        std::vector<S> occ(static_cast<size_t>(V));
        for (long t = 0; t < T; ++t) {
          std::fill(occ.begin(), occ.end(), detail::neg_inf<S>());
          for (long s = 0; s < n; ++s) {
            S ab = (*alpha)[t * n + s] + beta[t * n + s];
            occ[(*ext)[s]] = detail::logsumexp2(occ[(*ext)[s]], ab);
          }
          for (long k = 0; k < V; ++k) {
            if (occ[k] == detail::neg_inf<S>()) continue;
            ga[t * V + k] -= g * std::exp(occ[k] - logp);
          }
        }
      });
}

// Argmax decoding: collapse frame-level repeats, then drop blanks.
template <typename S>
std::vector<int> ctc_greedy_decode(const Tensor<S>& log_probs, int blank = 0) {
  const long T = log_probs.rows(), V = log_probs.cols();
  std::vector<int> out;
  int prev = -1;
  for (long t = 0; t < T; ++t) {
    const S* row = log_probs.values.data() + t * V;
    int best = 0;
    for (long k = 1; k < V; ++k) {
      if (row[k] > row[best]) best = static_cast<int>(k);
    }
    if (best != prev && best != blank) out.push_back(best);
    prev = best;
  }
  return out;
}

}  // namespace cslid

#endif  // CSLID_TENSOR_CTC_HPP_
