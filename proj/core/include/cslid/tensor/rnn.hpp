// core/include/cslid/tensor/rnn.hpp

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

#ifndef CSLID_TENSOR_RNN_HPP_
#define CSLID_TENSOR_RNN_HPP_

#include <memory>
#include <string>
#include <vector>

#include "cslid/tensor/layers.hpp"

namespace cslid {

namespace detail {

template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

template <typename S>
Eigen::Map<const RowVec<S>> row_of(const std::vector<S>& v, long row,
                                   long width) {
  return {v.data() + row * width, width};
}

}  // namespace detail

// Gated recurrent unit over [T x D] input, gate order [z | r | n] in the
// packed matrices.  The candidate gate applies the reset gate to the hidden
// state before the recurrent projection:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   n = tanh(x Wn + (r . h) Un + bn)
//   h' = (1 - z) . n + z . h
// The input projection for all steps runs as a single GEMM; the recurrent
// path is sequential.
template <typename S>
struct GruLayer {
  Parameter<S> wx;  // [D x 3H]
  Parameter<S> wh;  // [H x 3H]
  Parameter<S> b;   // [3H]
  long hidden = 0;

  void init(const std::string& name, long d_in, long h, Rng& rng) {
    hidden = h;
    wx = Parameter<S>(name + ".wx",
                      xavier_uniform<S>({d_in, 3 * h}, d_in, h, rng));
    wh = Parameter<S>(name + ".wh", xavier_uniform<S>({h, 3 * h}, h, h, rng));
    b = Parameter<S>(name + ".b", Tensor<S>::zeros({3 * h}));
  }

  Var apply(Tape<S>& tp, Var x) {
    Var wxv = tp.param(wx);
    Var whv = tp.param(wh);
    Var bv = tp.param(b);
    const Tensor<S>& X = tp.val(x);
    const long T = X.rows(), D = X.cols(), H = hidden;
    CSLID_CHECK(D == wx.value.dim(0), ErrorKind::kShape,
                "gru: input width mismatch");

    auto xp = std::make_shared<std::vector<S>>(
        static_cast<size_t>(T * 3 * H));
    {
      auto Xm = detail::cmat(X.values, T, D);
      auto Wxm = detail::cmat(wx.value.values, D, 3 * H);
      auto Xpm = detail::mat(*xp, T, 3 * H);
      Xpm.noalias() = Xm * Wxm;
      for (long t = 0; t < T; ++t) {
        for (long j = 0; j < 3 * H; ++j) (*xp)[t * 3 * H + j] += b.value.values[j];
      }
    }

    auto hs = std::make_shared<std::vector<S>>(
        static_cast<size_t>((T + 1) * H), S(0));
    auto zs = std::make_shared<std::vector<S>>(static_cast<size_t>(T * H));
    auto rs = std::make_shared<std::vector<S>>(static_cast<size_t>(T * H));
    auto ns = std::make_shared<std::vector<S>>(static_cast<size_t>(T * H));

    {
      auto Whm = detail::cmat(wh.value.values, H, 3 * H);
      detail::RowVec<S> zr_pre(2 * H), hn_pre(H), rn(H);
      for (long t = 0; t < T; ++t) {
        auto hp = detail::row_of(*hs, t, H);
        zr_pre.noalias() = hp * Whm.leftCols(2 * H);
        S* z = zs->data() + t * H;
        S* r = rs->data() + t * H;
        S* n = ns->data() + t * H;
        const S* a = xp->data() + t * 3 * H;
        for (long j = 0; j < H; ++j) {
          z[j] = S(1) / (S(1) + std::exp(-(a[j] + zr_pre[j])));
          r[j] = S(1) / (S(1) + std::exp(-(a[H + j] + zr_pre[H + j])));
          rn[j] = r[j] * hp[j];
        }
        hn_pre.noalias() = rn * Whm.rightCols(H);
        S* h = hs->data() + (t + 1) * H;
        for (long j = 0; j < H; ++j) {
          n[j] = std::tanh(a[2 * H + j] + hn_pre[j]);
          h[j] = (S(1) - z[j]) * n[j] + z[j] * hp[j];
        }
      }
    }

    Tensor<S> out({T, H});
    std::copy(hs->begin() + H, hs->end(), out.values.begin());

    int out_id = static_cast<int>(tp.size());
    return tp.node(std::move(out), [&tp, x, wxv, whv, bv, xp, hs, zs, rs, ns,
                                    T, D, H, out_id]() {
      const auto& g = tp.grad(Var{out_id});
      const auto& whval = tp.val(whv).values;
      auto Whm = detail::cmat(whval, H, 3 * H);

      std::vector<S> dxp(static_cast<size_t>(T * 3 * H), S(0));
      std::vector<S> dwh(static_cast<size_t>(H * 3 * H), S(0));
      auto dWhm = detail::mat(dwh, H, 3 * H);
      detail::RowVec<S> dh(H), dh_next(H), dpn(H), drn(H), rn(H), dzr(2 * H);
      dh.setZero();

      for (long t = T - 1; t >= 0; --t) {
        const S* z = zs->data() + t * H;
        const S* r = rs->data() + t * H;
        const S* n = ns->data() + t * H;
        auto hp = detail::row_of(*hs, t, H);
        S* dxpt = dxp.data() + t * 3 * H;

        for (long j = 0; j < H; ++j) {
          S dht = g[t * H + j] + dh[j];
          S dz = dht * (hp[j] - n[j]);
          S dn = dht * (S(1) - z[j]);
          dh_next[j] = dht * z[j];
          dpn[j] = dn * (S(1) - n[j] * n[j]);
          rn[j] = r[j] * hp[j];
          dxpt[2 * H + j] = dpn[j];
          // z pre-activation; r handled after drn is known
          S dpz = dz * z[j] * (S(1) - z[j]);
          dxpt[j] = dpz;
        }
        drn.noalias() = dpn * Whm.rightCols(H).transpose();
        dWhm.rightCols(H).noalias() += rn.transpose() * dpn;
        for (long j = 0; j < H; ++j) {
          S dr = drn[j] * hp[j];
          dh_next[j] += drn[j] * r[j];
          S dpr = dr * r[j] * (S(1) - r[j]);
          dxpt[H + j] = dpr;
          dzr[j] = dxpt[j];
          dzr[H + j] = dpr;
        }
        dh_next.noalias() += dzr * Whm.leftCols(2 * H).transpose();
        dWhm.leftCols(2 * H).noalias() += hp.transpose() * dzr;
        dh = dh_next;
      }

      {
        const Tensor<S>& X = tp.val(x);
        const Tensor<S>& Wx = tp.val(wxv);
        auto dXpm = detail::cmat(dxp, T, 3 * H);
        auto gx = detail::mat(tp.grad(x), T, D);
        auto Wxm = detail::cmat(Wx.values, D, 3 * H);
        gx.noalias() += dXpm * Wxm.transpose();
        auto gwx = detail::mat(tp.grad(wxv), D, 3 * H);
        auto Xm = detail::cmat(X.values, T, D);
        gwx.noalias() += Xm.transpose() * dXpm;
        auto& gb = tp.grad(bv);
        for (long t = 0; t < T; ++t) {
          for (long j = 0; j < 3 * H; ++j) gb[j] += dxp[t * 3 * H + j];
        }
        auto gwh = detail::mat(tp.grad(whv), H, 3 * H);
        gwh.noalias() += dWhm;
      }
    });
  }

  std::vector<Parameter<S>*> params() { return {&wx, &wh, &b}; }
};

// Forward and reversed GRU passes concatenated per frame to [T x 2H].
template <typename S>
struct BiGruLayer {
  GruLayer<S> fwd, bwd;

  void init(const std::string& name, long d_in, long h, Rng& rng) {
    fwd.init(name + ".fwd", d_in, h, rng);
    bwd.init(name + ".bwd", d_in, h, rng);
  }

  Var apply(Tape<S>& tp, Var x) {
    Var yf = fwd.apply(tp, x);
    Var yb = reverse_rows(tp, bwd.apply(tp, reverse_rows(tp, x)));
    return concat_cols(tp, yf, yb);
  }

  std::vector<Parameter<S>*> params() {
    std::vector<Parameter<S>*> out = fwd.params();
    for (auto* p : bwd.params()) out.push_back(p);
    return out;
  }
};

// Long short-term memory over [T x D] input, gate order [i | f | g | o]:
//   i = sigmoid(x Wi + h Ui + bi)      f = sigmoid(x Wf + h Uf + bf)
//   g = tanh(x Wg + h Ug + bg)         o = sigmoid(x Wo + h Uo + bo)
//   c' = f . c + i . g                 h' = o . tanh(c')
template <typename S>
struct LstmLayer {
  Parameter<S> wx;  // [D x 4H]
  Parameter<S> wh;  // [H x 4H]
  Parameter<S> b;   // [4H]
  long hidden = 0;

  void init(const std::string& name, long d_in, long h, Rng& rng) {
    hidden = h;
    wx = Parameter<S>(name + ".wx",
                      xavier_uniform<S>({d_in, 4 * h}, d_in, h, rng));
    wh = Parameter<S>(name + ".wh", xavier_uniform<S>({h, 4 * h}, h, h, rng));
    b = Parameter<S>(name + ".b", Tensor<S>::zeros({4 * h}));
  }

  Var apply(Tape<S>& tp, Var x) {
    Var wxv = tp.param(wx);
    Var whv = tp.param(wh);
    Var bv = tp.param(b);
    const Tensor<S>& X = tp.val(x);
    const long T = X.rows(), D = X.cols(), H = hidden;
    CSLID_CHECK(D == wx.value.dim(0), ErrorKind::kShape,
                "lstm: input width mismatch");

    auto xp = std::make_shared<std::vector<S>>(
        static_cast<size_t>(T * 4 * H));
    {
      auto Xm = detail::cmat(X.values, T, D);
      auto Wxm = detail::cmat(wx.value.values, D, 4 * H);
      auto Xpm = detail::mat(*xp, T, 4 * H);
      Xpm.noalias() = Xm * Wxm;
      for (long t = 0; t < T; ++t) {
        for (long j = 0; j < 4 * H; ++j) (*xp)[t * 4 * H + j] += b.value.values[j];
      }
    }

    auto hs = std::make_shared<std::vector<S>>(
        static_cast<size_t>((T + 1) * H), S(0));
    auto cs = std::make_shared<std::vector<S>>(
        static_cast<size_t>((T + 1) * H), S(0));
    auto gates = std::make_shared<std::vector<S>>(
        static_cast<size_t>(T * 4 * H));  // post-activation [i|f|g|o]
    auto tcs = std::make_shared<std::vector<S>>(static_cast<size_t>(T * H));

    {
      auto Whm = detail::cmat(wh.value.values, H, 4 * H);
      detail::RowVec<S> pre(4 * H);
      for (long t = 0; t < T; ++t) {
        auto hp = detail::row_of(*hs, t, H);
        pre.noalias() = hp * Whm;
        const S* a = xp->data() + t * 4 * H;
        S* gate = gates->data() + t * 4 * H;
        const S* cp = cs->data() + t * H;
        S* c = cs->data() + (t + 1) * H;
        S* h = hs->data() + (t + 1) * H;
        S* tc = tcs->data() + t * H;
        for (long j = 0; j < H; ++j) {
          S pi = a[j] + pre[j];
          S pf = a[H + j] + pre[H + j];
          S pg = a[2 * H + j] + pre[2 * H + j];
          S po = a[3 * H + j] + pre[3 * H + j];
          S i_ = S(1) / (S(1) + std::exp(-pi));
          S f_ = S(1) / (S(1) + std::exp(-pf));
          S g_ = std::tanh(pg);
          S o_ = S(1) / (S(1) + std::exp(-po));
          gate[j] = i_;
          gate[H + j] = f_;
          gate[2 * H + j] = g_;
          gate[3 * H + j] = o_;
          c[j] = f_ * cp[j] + i_ * g_;
          tc[j] = std::tanh(c[j]);
          h[j] = o_ * tc[j];
        }
      }
    }

    Tensor<S> out({T, H});
    std::copy(hs->begin() + H, hs->end(), out.values.begin());

    int out_id = static_cast<int>(tp.size());
    return tp.node(std::move(out), [&tp, x, wxv, whv, bv, xp, hs, cs, gates,
                                    tcs, T, D, H, out_id]() {
      const auto& g = tp.grad(Var{out_id});
      const auto& whval = tp.val(whv).values;
      auto Whm = detail::cmat(whval, H, 4 * H);

      std::vector<S> dxp(static_cast<size_t>(T * 4 * H), S(0));
      std::vector<S> dwh(static_cast<size_t>(H * 4 * H), S(0));
      auto dWhm = detail::mat(dwh, H, 4 * H);
      detail::RowVec<S> dh(H), dc(H), dp(4 * H);
      dh.setZero();
      dc.setZero();

      for (long t = T - 1; t >= 0; --t) {
        const S* gate = gates->data() + t * 4 * H;
        const S* tc = tcs->data() + t * H;
        const S* cp = cs->data() + t * H;
        auto hp = detail::row_of(*hs, t, H);
        for (long j = 0; j < H; ++j) {
          S i_ = gate[j], f_ = gate[H + j], g_ = gate[2 * H + j],
            o_ = gate[3 * H + j];
          S dht = g[t * H + j] + dh[j];
          S do_ = dht * tc[j];
          S dct = dc[j] + dht * o_ * (S(1) - tc[j] * tc[j]);
          S di = dct * g_;
          S dg = dct * i_;
          S df = dct * cp[j];
          dc[j] = dct * f_;
          dp[j] = di * i_ * (S(1) - i_);
          dp[H + j] = df * f_ * (S(1) - f_);
          dp[2 * H + j] = dg * (S(1) - g_ * g_);
          dp[3 * H + j] = do_ * o_ * (S(1) - o_);
        }
        S* dxpt = dxp.data() + t * 4 * H;
        for (long j = 0; j < 4 * H; ++j) dxpt[j] = dp[j];
        dh.noalias() = dp * Whm.transpose();
        dWhm.noalias() += hp.transpose() * dp;
      }

      {
        const Tensor<S>& X = tp.val(x);
        const Tensor<S>& Wx = tp.val(wxv);
        auto dXpm = detail::cmat(dxp, T, 4 * H);
        auto gx = detail::mat(tp.grad(x), T, D);
        auto Wxm = detail::cmat(Wx.values, D, 4 * H);
        gx.noalias() += dXpm * Wxm.transpose();
        auto gwx = detail::mat(tp.grad(wxv), D, 4 * H);
        auto Xm = detail::cmat(X.values, T, D);
        gwx.noalias() += Xm.transpose() * dXpm;
        auto& gb = tp.grad(bv);
        for (long t = 0; t < T; ++t) {
          for (long j = 0; j < 4 * H; ++j) gb[j] += dxp[t * 4 * H + j];
        }
        auto gwh = detail::mat(tp.grad(whv), H, 4 * H);
        gwh.noalias() += dWhm;
      }
    });
  }

  std::vector<Parameter<S>*> params() { return {&wx, &wh, &b}; }
};

}  // namespace cslid

#endif  // CSLID_TENSOR_RNN_HPP_
