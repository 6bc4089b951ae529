// core/include/cslid/tensor/tape.hpp

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

#ifndef CSLID_TENSOR_TAPE_HPP_
#define CSLID_TENSOR_TAPE_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cslid/tensor/tensor.hpp"

namespace cslid {

// Handle into a Tape.  Vars are only meaningful on the tape that made them.
struct Var {
  int id = -1;
  bool ok() const { return id >= 0; }
};

template <typename S>
using MatRM = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Reverse-mode tape.  Every operation appends a node whose closure, run in
// reverse order, scatters the node's output gradient into its inputs.
// Nodes whose output gradient was never touched are skipped.
template <typename S>
class Tape {
 public:
  Var input(Tensor<S> t) {
    entries_.push_back(Entry{std::move(t), nullptr, {}, {}});
    return Var{static_cast<int>(entries_.size()) - 1};
  }

  // The parameter's tensor is referenced, not copied; it must outlive the
  // tape.  backward() adds the leaf gradient into p.grad.
  Var param(Parameter<S>& p) {
    entries_.push_back(Entry{{}, &p.value, {}, {}});
    Var v{static_cast<int>(entries_.size()) - 1};
    Parameter<S>* pp = &p;
    entries_.back().bwd = [this, v, pp]() {
      const std::vector<S>& g = entries_[v.id].grad;
      for (size_t i = 0; i < g.size(); ++i) pp->grad[i] += g[i];
    };
    return v;
  }

  Var node(Tensor<S> value, std::function<void()> bwd) {
    entries_.push_back(Entry{std::move(value), nullptr, {}, std::move(bwd)});
    return Var{static_cast<int>(entries_.size()) - 1};
  }

  const Tensor<S>& val(Var v) const { return entries_[v.id].value_ref(); }

  // Gradient buffer, allocated as zeros on first touch.
  std::vector<S>& grad(Var v) {
    Entry& e = entries_[v.id];
    if (e.grad.empty()) {
      e.grad.assign(static_cast<size_t>(e.value_ref().numel()), S(0));
    }
    return e.grad;
  }

  bool has_grad(Var v) const { return !entries_[v.id].grad.empty(); }

  // Seeds the scalar loss gradient and runs all node closures newest first.
  // A seed of 1/B turns per-utterance losses into batch-mean gradients when
  // utterances are processed one tape at a time.
  void backward(Var loss, S seed = S(1)) {
    CSLID_CHECK(entries_[loss.id].value_ref().numel() == 1, ErrorKind::kShape,
                "backward: loss must be scalar");
    grad(loss)[0] += seed;
    for (size_t i = entries_.size(); i-- > 0;) {
      Entry& e = entries_[i];
      if (e.bwd && !e.grad.empty()) e.bwd();
    }
  }

  size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    Tensor<S> owned;
    const Tensor<S>* view = nullptr;  // set for parameter leaves
    std::vector<S> grad;
    std::function<void()> bwd;
    const Tensor<S>& value_ref() const { return view ? *view : owned; }
  };
  std::vector<Entry> entries_;
};

namespace detail {

template <typename S>
Eigen::Map<const MatRM<S>> mat(const Tensor<S>& t) {
  return {t.values.data(), t.rows(), t.cols()};
}

template <typename S>
Eigen::Map<MatRM<S>> mat(std::vector<S>& data, long rows, long cols) {
  return {data.data(), rows, cols};
}

template <typename S>
Eigen::Map<const MatRM<S>> cmat(const std::vector<S>& data, long rows,
                                long cols) {
  return {data.data(), rows, cols};
}

}  // namespace detail

// C = op(A) * op(B) where op is optional transposition.
template <typename S>
Var matmul(Tape<S>& tp, Var a, Var b, bool trans_a = false,
           bool trans_b = false) {
  const Tensor<S>& A = tp.val(a);
  const Tensor<S>& B = tp.val(b);
  long m = trans_a ? A.cols() : A.rows();
  long k = trans_a ? A.rows() : A.cols();
  long kb = trans_b ? B.cols() : B.rows();
  long n = trans_b ? B.rows() : B.cols();
  CSLID_CHECK(k == kb, ErrorKind::kShape,
              "matmul: inner dimensions disagree: " + shape_string(A.shape) +
                  (trans_a ? "^T" : "") + " * " + shape_string(B.shape) +
                  (trans_b ? "^T" : ""));

  Tensor<S> out({m, n});
  {
    auto Am = detail::mat(A);
    auto Bm = detail::mat(B);
    auto Cm = detail::mat(out.values, m, n);
    if (!trans_a && !trans_b) Cm.noalias() = Am * Bm;
    else if (trans_a && !trans_b) Cm.noalias() = Am.transpose() * Bm;
    else if (!trans_a && trans_b) Cm.noalias() = Am * Bm.transpose();
    else Cm.noalias() = Am.transpose() * Bm.transpose();
  }
  int out_id = static_cast<int>(tp.size());
  return tp.node(std::move(out), [&tp, a, b, out_id, trans_a, trans_b, m,
                                  n]() {
    auto G = detail::cmat(tp.grad(Var{out_id}), m, n);
    const Tensor<S>& A = tp.val(a);
    const Tensor<S>& B = tp.val(b);
    auto Am = detail::mat(A);
    auto Bm = detail::mat(B);
    auto Ga = detail::mat(tp.grad(a), A.rows(), A.cols());
    auto Gb = detail::mat(tp.grad(b), B.rows(), B.cols());
    if (!trans_a && !trans_b) {
      Ga.noalias() += G * Bm.transpose();
      Gb.noalias() += Am.transpose() * G;
    } else if (trans_a && !trans_b) {
      Ga.noalias() += Bm * G.transpose();
      Gb.noalias() += Am * G;
    } else if (!trans_a && trans_b) {
      Ga.noalias() += G * Bm;
      Gb.noalias() += G.transpose() * Am;
    } else {
      Ga.noalias() += Bm.transpose() * G.transpose();
      Gb.noalias() += G.transpose() * Am.transpose();
    }
  });
}

namespace detail {

// Most closures follow one pattern: read the output grad, scatter into
// inputs.  This helper wires the output Var into the closure after the node
// exists.
template <typename S, typename F>
Var unary_node(Tape<S>& tp, Tensor<S> value, Var a, F&& scatter) {
  int out_id = static_cast<int>(tp.size());
  return tp.node(std::move(value),
                 [&tp, a, out_id, scatter = std::forward<F>(scatter)]() {
                   scatter(tp, a, Var{out_id});
                 });
}

template <typename S, typename F>
Var binary_node(Tape<S>& tp, Tensor<S> value, Var a, Var b, F&& scatter) {
  int out_id = static_cast<int>(tp.size());
  return tp.node(std::move(value),
                 [&tp, a, b, out_id, scatter = std::forward<F>(scatter)]() {
                   scatter(tp, a, b, Var{out_id});
                 });
}

}  // namespace detail

template <typename S>
Var add(Tape<S>& tp, Var a, Var b) {
  const Tensor<S>& A = tp.val(a);
  const Tensor<S>& B = tp.val(b);
  CSLID_CHECK(same_shape(A.shape, B.shape), ErrorKind::kShape,
              "add: shapes differ: " + shape_string(A.shape) + " vs " +
                  shape_string(B.shape));
  Tensor<S> out = A;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += B.values[i];
  return detail::binary_node(tp, std::move(out), a, b,
                             [](Tape<S>& t, Var a, Var b, Var o) {
                               const auto& g = t.grad(o);
                               auto& ga = t.grad(a);
                               auto& gb = t.grad(b);
                               for (size_t i = 0; i < g.size(); ++i) {
                                 ga[i] += g[i];
                                 gb[i] += g[i];
                               }
                             });
}

// a: [m x n], bias: [n], broadcast over rows.
template <typename S>
Var add_rowvec(Tape<S>& tp, Var a, Var bias) {
  const Tensor<S>& A = tp.val(a);
  const Tensor<S>& B = tp.val(bias);
  CSLID_CHECK(B.numel() == A.cols(), ErrorKind::kShape,
              "add_rowvec: bias length " + std::to_string(B.numel()) +
                  " does not match columns " + std::to_string(A.cols()));
  Tensor<S> out = A;
  long m = A.rows(), n = A.cols();
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) out.values[i * n + j] += B.values[j];
  }
  return detail::binary_node(
      tp, std::move(out), a, bias, [m, n](Tape<S>& t, Var a, Var b, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        auto& gb = t.grad(b);
        for (long i = 0; i < m; ++i) {
          for (long j = 0; j < n; ++j) {
            ga[i * n + j] += g[i * n + j];
            gb[j] += g[i * n + j];
          }
        }
      });
}

template <typename S>
Var mul(Tape<S>& tp, Var a, Var b) {
  const Tensor<S>& A = tp.val(a);
  const Tensor<S>& B = tp.val(b);
  CSLID_CHECK(same_shape(A.shape, B.shape), ErrorKind::kShape,
              "mul: shapes differ");
  Tensor<S> out = A;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] *= B.values[i];
  return detail::binary_node(tp, std::move(out), a, b,
                             [](Tape<S>& t, Var a, Var b, Var o) {
                               const auto& g = t.grad(o);
                               const auto& av = t.val(a).values;
                               const auto& bv = t.val(b).values;
                               auto& ga = t.grad(a);
                               auto& gb = t.grad(b);
                               for (size_t i = 0; i < g.size(); ++i) {
                                 ga[i] += g[i] * bv[i];
                                 gb[i] += g[i] * av[i];
                               }
                             });
}

template <typename S>
Var scale(Tape<S>& tp, Var a, S k) {
  Tensor<S> out = tp.val(a);
  for (auto& v : out.values) v *= k;
  return detail::unary_node(tp, std::move(out), a,
                            [k](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                ga[i] += g[i] * k;
                              }
                            });
}

template <typename S>
Var relu(Tape<S>& tp, Var a) {
  Tensor<S> out = tp.val(a);
  for (auto& v : out.values) v = v > S(0) ? v : S(0);
  return detail::unary_node(tp, std::move(out), a,
                            [](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              const auto& x = t.val(a).values;
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                if (x[i] > S(0)) ga[i] += g[i];
                              }
                            });
}

template <typename S>
Var sigmoid(Tape<S>& tp, Var a) {
  Tensor<S> out = tp.val(a);
  for (auto& v : out.values) v = S(1) / (S(1) + std::exp(-v));
  return detail::unary_node(tp, std::move(out), a,
                            [](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              const auto& y = t.val(o).values;
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                ga[i] += g[i] * y[i] * (S(1) - y[i]);
                              }
                            });
}

template <typename S>
Var tanh_op(Tape<S>& tp, Var a) {
  Tensor<S> out = tp.val(a);
  for (auto& v : out.values) v = std::tanh(v);
  return detail::unary_node(tp, std::move(out), a,
                            [](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              const auto& y = t.val(o).values;
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                ga[i] += g[i] * (S(1) - y[i] * y[i]);
                              }
                            });
}

template <typename S>
Var slice_rows(Tape<S>& tp, Var a, long r0, long r1) {
  const Tensor<S>& A = tp.val(a);
  long n = A.cols();
  CSLID_CHECK(0 <= r0 && r0 < r1 && r1 <= A.rows(), ErrorKind::kShape,
              "slice_rows: range out of bounds");
  Tensor<S> out({r1 - r0, n});
  std::copy(A.values.begin() + r0 * n, A.values.begin() + r1 * n,
            out.values.begin());
  return detail::unary_node(tp, std::move(out), a,
                            [r0, n](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                ga[static_cast<size_t>(r0 * n) + i] += g[i];
                              }
                            });
}

template <typename S>
Var slice_cols(Tape<S>& tp, Var a, long c0, long c1) {
  const Tensor<S>& A = tp.val(a);
  long m = A.rows(), n = A.cols();
  CSLID_CHECK(0 <= c0 && c0 < c1 && c1 <= n, ErrorKind::kShape,
              "slice_cols: range out of bounds");
  long w = c1 - c0;
  Tensor<S> out({m, w});
  for (long i = 0; i < m; ++i) {
    std::copy(A.values.begin() + i * n + c0, A.values.begin() + i * n + c1,
              out.values.begin() + i * w);
  }
  return detail::unary_node(tp, std::move(out), a,
                            [c0, n, w, m](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (long i = 0; i < m; ++i) {
                                for (long j = 0; j < w; ++j) {
                                  ga[i * n + c0 + j] += g[i * w + j];
                                }
                              }
                            });
}

template <typename S>
Var concat_cols(Tape<S>& tp, Var a, Var b) {
  const Tensor<S>& A = tp.val(a);
  const Tensor<S>& B = tp.val(b);
  CSLID_CHECK(A.rows() == B.rows(), ErrorKind::kShape,
              "concat_cols: row counts differ");
  long m = A.rows(), na = A.cols(), nb = B.cols();
  Tensor<S> out({m, na + nb});
  for (long i = 0; i < m; ++i) {
    std::copy(A.values.begin() + i * na, A.values.begin() + (i + 1) * na,
              out.values.begin() + i * (na + nb));
    std::copy(B.values.begin() + i * nb, B.values.begin() + (i + 1) * nb,
              out.values.begin() + i * (na + nb) + na);
  }
  return detail::binary_node(
      tp, std::move(out), a, b, [m, na, nb](Tape<S>& t, Var a, Var b, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        auto& gb = t.grad(b);
        for (long i = 0; i < m; ++i) {
          for (long j = 0; j < na; ++j) ga[i * na + j] += g[i * (na + nb) + j];
          for (long j = 0; j < nb; ++j) {
            gb[i * nb + j] += g[i * (na + nb) + na + j];
          }
        }
      });
}

template <typename S>
Var concat_rows(Tape<S>& tp, Var a, Var b) {
  const Tensor<S>& A = tp.val(a);
  const Tensor<S>& B = tp.val(b);
  CSLID_CHECK(A.cols() == B.cols(), ErrorKind::kShape,
              "concat_rows: column counts differ");
  Tensor<S> out({A.rows() + B.rows(), A.cols()});
  std::copy(A.values.begin(), A.values.end(), out.values.begin());
  std::copy(B.values.begin(), B.values.end(),
            out.values.begin() + A.numel());
  long na = A.numel();
  return detail::binary_node(tp, std::move(out), a, b,
                             [na](Tape<S>& t, Var a, Var b, Var o) {
                               const auto& g = t.grad(o);
                               auto& ga = t.grad(a);
                               auto& gb = t.grad(b);
                               for (long i = 0; i < na; ++i) ga[i] += g[i];
                               for (size_t i = na; i < g.size(); ++i) {
                                 gb[i - na] += g[i];
                               }
                             });
}

template <typename S>
Var reverse_rows(Tape<S>& tp, Var a) {
  const Tensor<S>& A = tp.val(a);
  long m = A.rows(), n = A.cols();
  Tensor<S> out({m, n});
  for (long i = 0; i < m; ++i) {
    std::copy(A.values.begin() + i * n, A.values.begin() + (i + 1) * n,
              out.values.begin() + (m - 1 - i) * n);
  }
  return detail::unary_node(tp, std::move(out), a,
                            [m, n](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (long i = 0; i < m; ++i) {
                                for (long j = 0; j < n; ++j) {
                                  ga[i * n + j] += g[(m - 1 - i) * n + j];
                                }
                              }
                            });
}

template <typename S>
Var reshape(Tape<S>& tp, Var a, std::vector<long> dims) {
  const Tensor<S>& A = tp.val(a);
  CSLID_CHECK(Tensor<S>::numel_of(dims) == A.numel(), ErrorKind::kShape,
              "reshape: element count mismatch");
  Tensor<S> out;
  out.shape = std::move(dims);
  out.values = A.values;
  return detail::unary_node(tp, std::move(out), a,
                            [](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                ga[i] += g[i];
                              }
                            });
}

template <typename S>
Var softmax_rows(Tape<S>& tp, Var a) {
  const Tensor<S>& A = tp.val(a);
  long m = A.rows(), n = A.cols();
  Tensor<S> out({m, n});
  for (long i = 0; i < m; ++i) {
    const S* x = A.values.data() + i * n;
    S* y = out.values.data() + i * n;
    S mx = x[0];
    for (long j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    S sum = S(0);
    for (long j = 0; j < n; ++j) {
      y[j] = std::exp(x[j] - mx);
      sum += y[j];
    }
    for (long j = 0; j < n; ++j) y[j] /= sum;
  }
  return detail::unary_node(
      tp, std::move(out), a, [m, n](Tape<S>& t, Var a, Var o) {
        const auto& g = t.grad(o);
        const auto& y = t.val(o).values;
        auto& ga = t.grad(a);
        for (long i = 0; i < m; ++i) {
          S dot = S(0);
          for (long j = 0; j < n; ++j) dot += g[i * n + j] * y[i * n + j];
          for (long j = 0; j < n; ++j) {
            ga[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
          }
        }
      });
}

template <typename S>
Var log_softmax_rows(Tape<S>& tp, Var a) {
  const Tensor<S>& A = tp.val(a);
  long m = A.rows(), n = A.cols();
  Tensor<S> out({m, n});
  for (long i = 0; i < m; ++i) {
    const S* x = A.values.data() + i * n;
    S* y = out.values.data() + i * n;
    S mx = x[0];
    for (long j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    S sum = S(0);
    for (long j = 0; j < n; ++j) sum += std::exp(x[j] - mx);
    S lse = mx + std::log(sum);
    for (long j = 0; j < n; ++j) y[j] = x[j] - lse;
  }
  return detail::unary_node(
      tp, std::move(out), a, [m, n](Tape<S>& t, Var a, Var o) {
        const auto& g = t.grad(o);
        const auto& y = t.val(o).values;
        auto& ga = t.grad(a);
        for (long i = 0; i < m; ++i) {
          S gsum = S(0);
          for (long j = 0; j < n; ++j) gsum += g[i * n + j];
          for (long j = 0; j < n; ++j) {
            ga[i * n + j] += g[i * n + j] - std::exp(y[i * n + j]) * gsum;
          }
        }
      });
}

template <typename S>
Var sum_all(Tape<S>& tp, Var a) {
  const Tensor<S>& A = tp.val(a);
  S total = S(0);
  for (S v : A.values) total += v;
  return detail::unary_node(tp, Tensor<S>::from({1}, {total}), a,
                            [](Tape<S>& t, Var a, Var o) {
                              S g = t.grad(o)[0];
                              for (auto& v : t.grad(a)) v += g;
                            });
}

template <typename S>
Var mean_all(Tape<S>& tp, Var a) {
  const Tensor<S>& A = tp.val(a);
  S total = S(0);
  for (S v : A.values) total += v;
  S n = static_cast<S>(A.numel());
  return detail::unary_node(tp, Tensor<S>::from({1}, {total / n}), a,
                            [n](Tape<S>& t, Var a, Var o) {
                              S g = t.grad(o)[0] / n;
                              for (auto& v : t.grad(a)) v += g;
                            });
}

// Mean cross entropy of logits rows against integer labels.
template <typename S>
Var softmax_cross_entropy(Tape<S>& tp, Var logits,
                          const std::vector<int>& labels) {
  const Tensor<S>& A = tp.val(logits);
  long m = A.rows(), n = A.cols();
  CSLID_CHECK(static_cast<long>(labels.size()) == m, ErrorKind::kShape,
              "softmax_cross_entropy: one label per row required");
  for (int y : labels) {
    CSLID_CHECK(0 <= y && y < n, ErrorKind::kArgument,
                "softmax_cross_entropy: label out of range");
  }
  // Keep the probabilities for the backward pass.
  auto probs = std::make_shared<std::vector<S>>(A.values.size());
  S loss = S(0);
  for (long i = 0; i < m; ++i) {
    const S* x = A.values.data() + i * n;
    S* p = probs->data() + i * n;
    S mx = x[0];
    for (long j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    S sum = S(0);
    for (long j = 0; j < n; ++j) {
      p[j] = std::exp(x[j] - mx);
      sum += p[j];
    }
    for (long j = 0; j < n; ++j) p[j] /= sum;
    loss -= std::log(std::max(p[labels[i]], std::numeric_limits<S>::min()));
  }
  loss /= static_cast<S>(m);
  return detail::unary_node(
      tp, Tensor<S>::from({1}, {loss}), logits,
      [m, n, labels, probs](Tape<S>& t, Var a, Var o) {
        S g = t.grad(o)[0] / static_cast<S>(m);
        auto& ga = t.grad(a);
        for (long i = 0; i < m; ++i) {
          for (long j = 0; j < n; ++j) {
            S onehot = j == labels[i] ? S(1) : S(0);
            ga[i * n + j] += g * ((*probs)[i * n + j] - onehot);
          }
        }
      });
}

// Inverted dropout.  Inactive (eval mode or zero rate) it is a no-op that
// returns the input Var itself.
template <typename S>
Var dropout(Tape<S>& tp, Var a, double rate, Rng& rng, bool training) {
  if (!training || rate <= 0.0) return a;
  CSLID_CHECK(rate < 1.0, ErrorKind::kConfig, "dropout: rate must be below 1");
  const Tensor<S>& A = tp.val(a);
  auto mask = std::make_shared<std::vector<S>>(A.values.size());
  S keep_scale = static_cast<S>(1.0 / (1.0 - rate));
  Tensor<S> out = A;
  for (size_t i = 0; i < out.values.size(); ++i) {
    (*mask)[i] = rng.uniform() >= rate ? keep_scale : S(0);
    out.values[i] *= (*mask)[i];
  }
  return detail::unary_node(tp, std::move(out), a,
                            [mask](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (size_t i = 0; i < g.size(); ++i) {
                                ga[i] += g[i] * (*mask)[i];
                              }
                            });
}

}  // namespace cslid

#endif  // CSLID_TENSOR_TAPE_HPP_
