// core/include/cslid/tensor/layers.hpp

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

#ifndef CSLID_TENSOR_LAYERS_HPP_
#define CSLID_TENSOR_LAYERS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "cslid/tensor/tape.hpp"

namespace cslid {

template <typename S>
Tensor<S> xavier_uniform(std::vector<long> dims, long fan_in, long fan_out,
                         Rng& rng) {
  S limit = static_cast<S>(std::sqrt(6.0 / (fan_in + fan_out)));
  return Tensor<S>::uniform(std::move(dims), rng, -limit, limit);
}

// y = x * w + b with x: [m x d_in], w: [d_in x d_out].
template <typename S>
struct LinearLayer {
  Parameter<S> w, b;

  void init(const std::string& name, long d_in, long d_out, Rng& rng) {
    w = Parameter<S>(name + ".w",
                     xavier_uniform<S>({d_in, d_out}, d_in, d_out, rng));
    b = Parameter<S>(name + ".b", Tensor<S>::zeros({d_out}));
  }

  Var apply(Tape<S>& tp, Var x) {
    return add_rowvec(tp, matmul(tp, x, tp.param(w)), tp.param(b));
  }

  std::vector<Parameter<S>*> params() { return {&w, &b}; }
};

// 2-D convolution over a [C_in x H x W] tensor via im2col and one GEMM.
template <typename S>
struct Conv2dLayer {
  Parameter<S> w;  // [C_out x C_in x kh x kw]
  Parameter<S> b;  // [C_out]
  long kh = 3, kw = 3;
  long stride_h = 1, stride_w = 1;
  long pad = 1;

  void init(const std::string& name, long c_in, long c_out, long kernel_h,
            long kernel_w, long s_h, long s_w, long padding, Rng& rng) {
    kh = kernel_h;
    kw = kernel_w;
    stride_h = s_h;
    stride_w = s_w;
    pad = padding;
    long fan_in = c_in * kh * kw;
    long fan_out = c_out * kh * kw;
    w = Parameter<S>(name + ".w", xavier_uniform<S>({c_out, c_in, kh, kw},
                                                    fan_in, fan_out, rng));
    b = Parameter<S>(name + ".b", Tensor<S>::zeros({c_out}));
  }

  Var apply(Tape<S>& tp, Var x) {
    Var wv = tp.param(w);
    Var bv = tp.param(b);
    const Tensor<S>& X = tp.val(x);
    CSLID_CHECK(X.rank() == 3, ErrorKind::kShape,
                "conv2d: input must be [C x H x W]");
    const long c_in = X.dim(0), H = X.dim(1), W = X.dim(2);
    const long c_out = w.value.dim(0);
    CSLID_CHECK(w.value.dim(1) == c_in, ErrorKind::kShape,
                "conv2d: input channels mismatch");
    const long h_out = (H + 2 * pad - kh) / stride_h + 1;
    const long w_out = (W + 2 * pad - kw) / stride_w + 1;
    CSLID_CHECK(h_out > 0 && w_out > 0, ErrorKind::kShape,
                "conv2d: output would be empty");

    const long patch = c_in * kh * kw;
    const long cols_n = h_out * w_out;
    auto cols = std::make_shared<std::vector<S>>(
        static_cast<size_t>(patch * cols_n), S(0));
    for (long c = 0; c < c_in; ++c) {
      for (long u = 0; u < kh; ++u) {
        for (long v = 0; v < kw; ++v) {
          long row = (c * kh + u) * kw + v;
          for (long i = 0; i < h_out; ++i) {
            long src_i = i * stride_h + u - pad;
            if (src_i < 0 || src_i >= H) continue;
            for (long j = 0; j < w_out; ++j) {
              long src_j = j * stride_w + v - pad;
              if (src_j < 0 || src_j >= W) continue;
              (*cols)[row * cols_n + i * w_out + j] =
                  X.values[(c * H + src_i) * W + src_j];
            }
          }
        }
      }
    }

    Tensor<S> out({c_out, h_out, w_out});
    {
      auto Wm = detail::cmat(w.value.values, c_out, patch);
      auto Cm = detail::cmat(*cols, patch, cols_n);
      auto Ym = detail::mat(out.values, c_out, cols_n);
      Ym.noalias() = Wm * Cm;
      for (long o = 0; o < c_out; ++o) {
        Ym.row(o).array() += b.value.values[o];
      }
    }

    long kh_ = kh, kw_ = kw, sh = stride_h, sw = stride_w, pd = pad;
    int out_id = static_cast<int>(tp.size());
    return tp.node(
        std::move(out),
        [&tp, x, wv, bv, cols, c_in, c_out, H, W, h_out, w_out, patch, cols_n,
         kh_, kw_, sh, sw, pd, out_id]() {
          auto G = detail::cmat(tp.grad(Var{out_id}), c_out, cols_n);
          // Weight and bias gradients from the GEMM view.
          {
            auto Gw = detail::mat(tp.grad(wv), c_out, patch);
            auto Cm = detail::cmat(*cols, patch, cols_n);
            Gw.noalias() += G * Cm.transpose();
            auto& gb = tp.grad(bv);
            for (long o = 0; o < c_out; ++o) gb[o] += G.row(o).sum();
          }
          // Input gradient: matmul back to column space, scatter col2im.
          std::vector<S> gcols(static_cast<size_t>(patch * cols_n));
          {
            const Tensor<S>& Wt = tp.val(wv);
            auto Wm = detail::cmat(Wt.values, c_out, patch);
            auto Gc = detail::mat(gcols, patch, cols_n);
            Gc.noalias() = Wm.transpose() * G;
          }
          auto& gx = tp.grad(x);
          for (long c = 0; c < c_in; ++c) {
            for (long u = 0; u < kh_; ++u) {
              for (long v = 0; v < kw_; ++v) {
                long row = (c * kh_ + u) * kw_ + v;
                for (long i = 0; i < h_out; ++i) {
                  long src_i = i * sh + u - pd;
                  if (src_i < 0 || src_i >= H) continue;
                  for (long j = 0; j < w_out; ++j) {
                    long src_j = j * sw + v - pd;
                    if (src_j < 0 || src_j >= W) continue;
                    gx[(c * H + src_i) * W + src_j] +=
                        gcols[row * cols_n + i * w_out + j];
                  }
                }
              }
            }
          }
        });
  }

  std::vector<Parameter<S>*> params() { return {&w, &b}; }
};

// Per-channel batch normalization over the spatial axes of one [C x H x W]
// input.  Training mode normalizes with batch statistics and folds them
// into the running averages; eval mode uses the running averages and is a
// per-channel affine map.
template <typename S>
struct BatchNorm2d {
  Parameter<S> gamma, beta;
  std::vector<S> running_mean, running_var;
  S momentum = S(0.9);
  S eps = S(1e-5);

  void init(const std::string& name, long channels) {
    gamma = Parameter<S>(name + ".gamma", Tensor<S>::full({channels}, S(1)));
    beta = Parameter<S>(name + ".beta", Tensor<S>::zeros({channels}));
    running_mean.assign(channels, S(0));
    running_var.assign(channels, S(1));
  }

  Var apply(Tape<S>& tp, Var x, bool training) {
    Var gv = tp.param(gamma);
    Var bv = tp.param(beta);
    const Tensor<S>& X = tp.val(x);
    CSLID_CHECK(X.rank() == 3, ErrorKind::kShape,
                "batch_norm: input must be [C x H x W]");
    const long C = X.dim(0);
    const long N = X.dim(1) * X.dim(2);
    CSLID_CHECK(static_cast<long>(running_mean.size()) == C,
                ErrorKind::kShape, "batch_norm: channel count mismatch");
    CSLID_CHECK(N > 0, ErrorKind::kShape, "batch_norm: empty spatial extent");

    auto xhat = std::make_shared<std::vector<S>>(X.values.size());
    auto istd = std::make_shared<std::vector<S>>(C);
    Tensor<S> out;
    out.shape = X.shape;
    out.values.resize(X.values.size());

    for (long c = 0; c < C; ++c) {
      const S* xc = X.values.data() + c * N;
      S mean, var;
      if (training) {
        S sum = S(0);
        for (long i = 0; i < N; ++i) sum += xc[i];
        mean = sum / static_cast<S>(N);
        S sq = S(0);
        for (long i = 0; i < N; ++i) sq += (xc[i] - mean) * (xc[i] - mean);
        var = sq / static_cast<S>(N);
        running_mean[c] = momentum * running_mean[c] + (S(1) - momentum) * mean;
        running_var[c] = momentum * running_var[c] + (S(1) - momentum) * var;
      } else {
        mean = running_mean[c];
        var = running_var[c];
      }
      S is = S(1) / std::sqrt(var + eps);
      (*istd)[c] = is;
      S g = gamma.value.values[c], bb = beta.value.values[c];
      for (long i = 0; i < N; ++i) {
        S xh = (xc[i] - mean) * is;
        (*xhat)[c * N + i] = xh;
        out.values[c * N + i] = g * xh + bb;
      }
    }

    int out_id = static_cast<int>(tp.size());
    return tp.node(std::move(out), [&tp, x, gv, bv, xhat, istd, C, N,
                                    training, out_id]() {
      const auto& g = tp.grad(Var{out_id});
      auto& gx = tp.grad(x);
      auto& ggamma = tp.grad(gv);
      auto& gbeta = tp.grad(bv);
      const auto& gam = tp.val(gv).values;
      for (long c = 0; c < C; ++c) {
        const S* gc = g.data() + c * N;
        const S* xh = xhat->data() + c * N;
        S sum_g = S(0), sum_gx = S(0);
        for (long i = 0; i < N; ++i) {
          sum_g += gc[i];
          sum_gx += gc[i] * xh[i];
        }
        ggamma[c] += sum_gx;
        gbeta[c] += sum_g;
        S k = gam[c] * (*istd)[c];
        if (training) {
          S inv_n = S(1) / static_cast<S>(N);
          for (long i = 0; i < N; ++i) {
            gx[c * N + i] +=
                k * (gc[i] - sum_g * inv_n - xh[i] * sum_gx * inv_n);
          }
        } else {
          for (long i = 0; i < N; ++i) gx[c * N + i] += k * gc[i];
        }
      }
    });
  }

  std::vector<Parameter<S>*> params() { return {&gamma, &beta}; }
};

// Two 3x3 convolutions with batch norm; the first can stride along the
// frequency axis.  The skip path is the identity unless the channel count
// or stride changes, in which case a strided 1x1 convolution matches shapes.
template <typename S>
struct ResidualBlock {
  Conv2dLayer<S> conv1, conv2;
  BatchNorm2d<S> bn1, bn2;
  bool projected = false;
  Conv2dLayer<S> shortcut;

  void init(const std::string& name, long c_in, long c_out, long freq_stride,
            Rng& rng) {
    conv1.init(name + ".conv1", c_in, c_out, 3, 3, 1, freq_stride, 1, rng);
    bn1.init(name + ".bn1", c_out);
    conv2.init(name + ".conv2", c_out, c_out, 3, 3, 1, 1, 1, rng);
    bn2.init(name + ".bn2", c_out);
    projected = c_in != c_out || freq_stride != 1;
    if (projected) {
      shortcut.init(name + ".shortcut", c_in, c_out, 1, 1, 1, freq_stride, 0,
                    rng);
    }
  }

  Var apply(Tape<S>& tp, Var x, bool training) {
    Var h = relu(tp, bn1.apply(tp, conv1.apply(tp, x), training));
    h = relu(tp, bn2.apply(tp, conv2.apply(tp, h), training));
    Var skip = projected ? shortcut.apply(tp, x) : x;
    return add(tp, h, skip);
  }

  std::vector<Parameter<S>*> params() {
    std::vector<Parameter<S>*> out;
    for (auto* p : conv1.params()) out.push_back(p);
    for (auto* p : bn1.params()) out.push_back(p);
    for (auto* p : conv2.params()) out.push_back(p);
    for (auto* p : bn2.params()) out.push_back(p);
    if (projected) {
      for (auto* p : shortcut.params()) out.push_back(p);
    }
    return out;
  }
};

// Row-wise layer normalization of an [m x d] input.
template <typename S>
struct LayerNorm {
  Parameter<S> gamma, beta;
  S eps = S(1e-5);

  void init(const std::string& name, long d) {
    gamma = Parameter<S>(name + ".gamma", Tensor<S>::full({d}, S(1)));
    beta = Parameter<S>(name + ".beta", Tensor<S>::zeros({d}));
  }

  Var apply(Tape<S>& tp, Var x) {
    Var gv = tp.param(gamma);
    Var bv = tp.param(beta);
    const Tensor<S>& X = tp.val(x);
    long m = X.rows(), d = X.cols();
    auto xhat = std::make_shared<std::vector<S>>(X.values.size());
    auto istd = std::make_shared<std::vector<S>>(m);
    Tensor<S> out({m, d});
    for (long i = 0; i < m; ++i) {
      const S* xr = X.values.data() + i * d;
      S mean = S(0);
      for (long j = 0; j < d; ++j) mean += xr[j];
      mean /= static_cast<S>(d);
      S var = S(0);
      for (long j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
      var /= static_cast<S>(d);
      S is = S(1) / std::sqrt(var + eps);
      (*istd)[i] = is;
      for (long j = 0; j < d; ++j) {
        S xh = (xr[j] - mean) * is;
        (*xhat)[i * d + j] = xh;
        out.values[i * d + j] =
            gamma.value.values[j] * xh + beta.value.values[j];
      }
    }
    int out_id = static_cast<int>(tp.size());
    return tp.node(std::move(out),
                   [&tp, x, gv, bv, xhat, istd, m, d, out_id]() {
                     const auto& g = tp.grad(Var{out_id});
                     auto& gx = tp.grad(x);
                     auto& ggamma = tp.grad(gv);
                     auto& gbeta = tp.grad(bv);
                     const auto& gam = tp.val(gv).values;
                     for (long i = 0; i < m; ++i) {
                       const S* gr = g.data() + i * d;
                       const S* xh = xhat->data() + i * d;
                       S sum_g = S(0), sum_gx = S(0);
                       for (long j = 0; j < d; ++j) {
                         S dxh = gr[j] * gam[j];
                         sum_g += dxh;
                         sum_gx += dxh * xh[j];
                         ggamma[j] += gr[j] * xh[j];
                         gbeta[j] += gr[j];
                       }
                       S inv_d = S(1) / static_cast<S>(d);
                       for (long j = 0; j < d; ++j) {
                         S dxh = gr[j] * gam[j];
                         gx[i * d + j] += (*istd)[i] * (dxh - sum_g * inv_d -
                                                        xh[j] * sum_gx * inv_d);
                       }
                     }
                   });
  }

  std::vector<Parameter<S>*> params() { return {&gamma, &beta}; }
};

// Per-channel 1-D convolution along the rows of an [T x d] input with same
// padding; kernel taps are stored as [k x d].
template <typename S>
struct DepthwiseConv1d {
  Parameter<S> w, b;
  long kernel = 15;

  void init(const std::string& name, long d, long k, Rng& rng) {
    CSLID_CHECK(k % 2 == 1, ErrorKind::kConfig,
                "depthwise_conv1d: kernel must be odd");
    kernel = k;
    w = Parameter<S>(name + ".w", xavier_uniform<S>({k, d}, k, k, rng));
    b = Parameter<S>(name + ".b", Tensor<S>::zeros({d}));
  }

  Var apply(Tape<S>& tp, Var x) {
    Var wv = tp.param(w);
    Var bv = tp.param(b);
    const Tensor<S>& X = tp.val(x);
    long T = X.rows(), d = X.cols(), k = kernel, half = kernel / 2;
    Tensor<S> out({T, d});
    for (long t = 0; t < T; ++t) {
      for (long c = 0; c < d; ++c) {
        S acc = b.value.values[c];
        for (long u = 0; u < k; ++u) {
          long s = t + u - half;
          if (s < 0 || s >= T) continue;
          acc += w.value.values[u * d + c] * X.values[s * d + c];
        }
        out.values[t * d + c] = acc;
      }
    }
    int out_id = static_cast<int>(tp.size());
    return tp.node(std::move(out), [&tp, x, wv, bv, T, d, k, half, out_id]() {
      const auto& g = tp.grad(Var{out_id});
      const auto& xv = tp.val(x).values;
      const auto& wt = tp.val(wv).values;
      auto& gx = tp.grad(x);
      auto& gw = tp.grad(wv);
      auto& gb = tp.grad(bv);
      for (long t = 0; t < T; ++t) {
        for (long c = 0; c < d; ++c) {
          S gy = g[t * d + c];
          gb[c] += gy;
          for (long u = 0; u < k; ++u) {
            long s = t + u - half;
            if (s < 0 || s >= T) continue;
            gw[u * d + c] += gy * xv[s * d + c];
            gx[s * d + c] += gy * wt[u * d + c];
          }
        }
      }
    });
  }

  std::vector<Parameter<S>*> params() { return {&w, &b}; }
};

// Rearranges a [C x T x F] stack of feature maps into a [T x C*F] matrix so
// recurrent layers can consume one row per frame.
template <typename S>
Var channels_to_cols(Tape<S>& tp, Var x) {
  const Tensor<S>& X = tp.val(x);
  CSLID_CHECK(X.rank() == 3, ErrorKind::kShape,
              "channels_to_cols: input must be [C x T x F]");
  const long C = X.dim(0), T = X.dim(1), F = X.dim(2);
  Tensor<S> out({T, C * F});
  for (long c = 0; c < C; ++c) {
    for (long t = 0; t < T; ++t) {
      for (long f = 0; f < F; ++f) {
        out.values[t * C * F + c * F + f] = X.values[(c * T + t) * F + f];
      }
    }
  }
  return detail::unary_node(tp, std::move(out), x,
                            [C, T, F](Tape<S>& t, Var a, Var o) {
                              const auto& g = t.grad(o);
                              auto& ga = t.grad(a);
                              for (long c = 0; c < C; ++c) {
                                for (long i = 0; i < T; ++i) {
                                  for (long f = 0; f < F; ++f) {
                                    ga[(c * T + i) * F + f] +=
                                        g[i * C * F + c * F + f];
                                  }
                                }
                              }
                            });
}

// Multi-head scaled dot-product self-attention over [T x d] rows.
template <typename S>
struct MultiHeadSelfAttention {
  LinearLayer<S> wq, wk, wv, wo;
  long heads = 4;
  long d_model = 0;

  void init(const std::string& name, long d, long num_heads, Rng& rng) {
    CSLID_CHECK(d % num_heads == 0, ErrorKind::kConfig,
                "attention: model dim must divide by head count");
    heads = num_heads;
    d_model = d;
    wq.init(name + ".wq", d, d, rng);
    wk.init(name + ".wk", d, d, rng);
    wv.init(name + ".wv", d, d, rng);
    wo.init(name + ".wo", d, d, rng);
  }

  Var apply(Tape<S>& tp, Var x) {
    long dh = d_model / heads;
    Var q = wq.apply(tp, x);
    Var k = wk.apply(tp, x);
    Var v = wv.apply(tp, x);
    S inv_sqrt = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh)));
    Var merged{-1};
    for (long h = 0; h < heads; ++h) {
      Var qh = slice_cols(tp, q, h * dh, (h + 1) * dh);
      Var kh = slice_cols(tp, k, h * dh, (h + 1) * dh);
      Var vh = slice_cols(tp, v, h * dh, (h + 1) * dh);
      Var scores = scale(tp, matmul(tp, qh, kh, false, true), inv_sqrt);
      Var ctx = matmul(tp, softmax_rows(tp, scores), vh);
      merged = h == 0 ? ctx : concat_cols(tp, merged, ctx);
    }
    return wo.apply(tp, merged);
  }

  std::vector<Parameter<S>*> params() {
    std::vector<Parameter<S>*> out;
    for (auto* l : {&wq, &wk, &wv, &wo}) {
      for (auto* p : l->params()) out.push_back(p);
    }
    return out;
  }
};

}  // namespace cslid

#endif  // CSLID_TENSOR_LAYERS_HPP_
