// Copyright 2026 The vslice Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vslice/ops.hpp"

#include <algorithm>
#include <cmath>

#include "vslice/kernels.hpp"

namespace vslice {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

std::vector<double>& pgrad(TensorImpl& node, int i) {
  return node.parents[i].grad();
}

bool pneeds(TensorImpl& node, int i) {
  return node.parents[i].requires_grad();
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.vec());
  const double* pb = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += pb[i];
  Tensor t = Tensor::make_node(a.shape(), std::move(out), {a, b},
                               [](TensorImpl& n) {
                                 for (int p = 0; p < 2; ++p) {
                                   if (!pneeds(n, p)) continue;
                                   auto& g = pgrad(n, p);
                                   for (size_t i = 0; i < g.size(); ++i)
                                     g[i] += n.grad[i];
                                 }
                               });
  check_finite(t, "add");
  return t;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.vec());
  const double* pb = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= pb[i];
  Tensor t = Tensor::make_node(a.shape(), std::move(out), {a, b},
                               [](TensorImpl& n) {
                                 if (pneeds(n, 0)) {
                                   auto& g = pgrad(n, 0);
                                   for (size_t i = 0; i < g.size(); ++i)
                                     g[i] += n.grad[i];
                                 }
                                 if (pneeds(n, 1)) {
                                   auto& g = pgrad(n, 1);
                                   for (size_t i = 0; i < g.size(); ++i)
                                     g[i] -= n.grad[i];
                                 }
                               });
  check_finite(t, "sub");
  return t;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.vec());
  const double* pb = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= pb[i];
  Tensor t = Tensor::make_node(
      a.shape(), std::move(out), {a, b}, [](TensorImpl& n) {
        const double* da = n.parents[0].data();
        const double* db = n.parents[1].data();
        if (pneeds(n, 0)) {
          auto& g = pgrad(n, 0);
          for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * db[i];
        }
        if (pneeds(n, 1)) {
          auto& g = pgrad(n, 1);
          for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * da[i];
        }
      });
  check_finite(t, "mul");
  return t;
}

Tensor add_scalar(const Tensor& a, double s) {
  std::vector<double> out(a.vec());
  for (auto& v : out) v += s;
  Tensor t = Tensor::make_node(a.shape(), std::move(out), {a},
                               [](TensorImpl& n) {
                                 if (!pneeds(n, 0)) return;
                                 auto& g = pgrad(n, 0);
                                 for (size_t i = 0; i < g.size(); ++i)
                                   g[i] += n.grad[i];
                               });
  check_finite(t, "add_scalar");
  return t;
}

Tensor mul_scalar(const Tensor& a, double s) {
  std::vector<double> out(a.vec());
  for (auto& v : out) v *= s;
  Tensor t = Tensor::make_node(a.shape(), std::move(out), {a},
                               [s](TensorImpl& n) {
                                 if (!pneeds(n, 0)) return;
                                 auto& g = pgrad(n, 0);
                                 for (size_t i = 0; i < g.size(); ++i)
                                   g[i] += s * n.grad[i];
                               });
  check_finite(t, "mul_scalar");
  return t;
}

Tensor relu(const Tensor& a) {
  std::vector<double> out(a.vec());
  for (auto& v : out) v = v > 0.0 ? v : 0.0;
  Tensor t = Tensor::make_node(
      a.shape(), std::move(out), {a}, [](TensorImpl& n) {
        if (!pneeds(n, 0)) return;
        const double* x = n.parents[0].data();
        auto& g = pgrad(n, 0);
        for (size_t i = 0; i < g.size(); ++i)
          if (x[i] > 0.0) g[i] += n.grad[i];
      });
  check_finite(t, "relu");
  return t;
}

Tensor log_clamped(const Tensor& a, double eps) {
  std::vector<double> out(a.vec());
  for (auto& v : out) v = std::log(std::max(v, eps));
  Tensor t = Tensor::make_node(
      a.shape(), std::move(out), {a}, [eps](TensorImpl& n) {
        if (!pneeds(n, 0)) return;
        const double* x = n.parents[0].data();
        auto& g = pgrad(n, 0);
        for (size_t i = 0; i < g.size(); ++i)
          if (x[i] > eps) g[i] += n.grad[i] / x[i];
      });
  check_finite(t, "log_clamped");
  return t;
}

Tensor add_rowvec(const Tensor& x, const Tensor& v) {
  require(x.ndim() == 2 && v.ndim() == 1 && v.dim(0) == x.dim(1),
          "add_rowvec: expected x [N,D], v [D]");
  const int N = x.dim(0), D = x.dim(1);
  std::vector<double> out(x.vec());
  const double* pv = v.data();
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < D; ++d) out[static_cast<size_t>(i) * D + d] += pv[d];
  Tensor t = Tensor::make_node(
      x.shape(), std::move(out), {x, v}, [N, D](TensorImpl& n) {
        if (pneeds(n, 0)) {
          auto& g = pgrad(n, 0);
          for (size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
        }
        if (pneeds(n, 1)) {
          auto& g = pgrad(n, 1);
          for (int i = 0; i < N; ++i)
            for (int d = 0; d < D; ++d)
              g[d] += n.grad[static_cast<size_t>(i) * D + d];
        }
      });
  check_finite(t, "add_rowvec");
  return t;
}

Tensor scale_rows(const Tensor& x, const Tensor& v) {
  require(x.ndim() == 2 && v.ndim() == 1 && v.dim(0) == x.dim(0),
          "scale_rows: expected x [N,D], v [N]");
  const int N = x.dim(0), D = x.dim(1);
  std::vector<double> out(x.vec());
  const double* pv = v.data();
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < D; ++d) out[static_cast<size_t>(i) * D + d] *= pv[i];
  Tensor t = Tensor::make_node(
      x.shape(), std::move(out), {x, v}, [N, D](TensorImpl& n) {
        const double* px = n.parents[0].data();
        const double* pv = n.parents[1].data();
        if (pneeds(n, 0)) {
          auto& g = pgrad(n, 0);
          for (int i = 0; i < N; ++i)
            for (int d = 0; d < D; ++d)
              g[static_cast<size_t>(i) * D + d] +=
                  n.grad[static_cast<size_t>(i) * D + d] * pv[i];
        }
        if (pneeds(n, 1)) {
          auto& g = pgrad(n, 1);
          for (int i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int d = 0; d < D; ++d)
              acc += n.grad[static_cast<size_t>(i) * D + d] *
                     px[static_cast<size_t>(i) * D + d];
            g[i] += acc;
          }
        }
      });
  check_finite(t, "scale_rows");
  return t;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.ndim() == 2 && b.ndim() == 2 && a.dim(1) == b.dim(0),
          "matmul: inner dimensions must agree");
  const int M = a.dim(0), K = a.dim(1), N = b.dim(1);
  std::vector<double> out(static_cast<size_t>(M) * N);
  kern::matmul(a.data(), b.data(), out.data(), M, K, N, false, true);
  Tensor t = Tensor::make_node(
      {M, N}, std::move(out), {a, b}, [M, K, N](TensorImpl& n) {
        // dA = dC * B^T ; dB = A^T * dC
        if (pneeds(n, 0))
          kern::matmul_nt(n.grad.data(), n.parents[1].data(),
                          pgrad(n, 0).data(), M, N, K, true, true);
        if (pneeds(n, 1))
          kern::matmul_tn(n.parents[0].data(), n.grad.data(),
                          pgrad(n, 1).data(), M, K, N, true, true);
      });
  check_finite(t, "matmul");
  return t;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(x.ndim() == 2 && w.ndim() == 2 && b.ndim() == 1 &&
              x.dim(1) == w.dim(1) && w.dim(0) == b.dim(0),
          "linear: expected x [N,Din], w [Dout,Din], b [Dout]");
  const int N = x.dim(0), Din = x.dim(1), Dout = w.dim(0);
  std::vector<double> out(static_cast<size_t>(N) * Dout);
  kern::matmul_nt(x.data(), w.data(), out.data(), N, Din, Dout, false, true);
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < Dout; ++d)
      out[static_cast<size_t>(i) * Dout + d] += b.data()[d];
  Tensor t = Tensor::make_node(
      {N, Dout}, std::move(out), {x, w, b}, [N, Din, Dout](TensorImpl& n) {
        // dx = dy * w ; dw = dy^T * x ; db = colsum(dy)
        if (pneeds(n, 0))
          kern::matmul(n.grad.data(), n.parents[1].data(), pgrad(n, 0).data(),
                       N, Dout, Din, true, true);
        if (pneeds(n, 1))
          kern::matmul_tn(n.grad.data(), n.parents[0].data(),
                          pgrad(n, 1).data(), N, Dout, Din, true, true);
        if (pneeds(n, 2)) {
          auto& g = pgrad(n, 2);
          for (int i = 0; i < N; ++i)
            for (int d = 0; d < Dout; ++d)
              g[d] += n.grad[static_cast<size_t>(i) * Dout + d];
        }
      });
  check_finite(t, "linear");
  return t;
}

Tensor transpose(const Tensor& x) {
  require(x.ndim() == 2, "transpose: expected 2D tensor");
  const int R = x.dim(0), C = x.dim(1);
  std::vector<double> out(static_cast<size_t>(R) * C);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j)
      out[static_cast<size_t>(j) * R + i] = x.data()[static_cast<size_t>(i) * C + j];
  Tensor t = Tensor::make_node(
      {C, R}, std::move(out), {x}, [R, C](TensorImpl& n) {
        if (!pneeds(n, 0)) return;
        auto& g = pgrad(n, 0);
        for (int i = 0; i < R; ++i)
          for (int j = 0; j < C; ++j)
            g[static_cast<size_t>(i) * C + j] +=
                n.grad[static_cast<size_t>(j) * R + i];
      });
  return t;
}

Tensor reshape(const Tensor& x, std::vector<int> shape) {
  require(shape_numel(shape) == x.numel(), "reshape: element count mismatch");
  std::vector<double> out(x.vec());
  Tensor t = Tensor::make_node(std::move(shape), std::move(out), {x},
                               [](TensorImpl& n) {
                                 if (!pneeds(n, 0)) return;
                                 auto& g = pgrad(n, 0);
                                 for (size_t i = 0; i < g.size(); ++i)
                                   g[i] += n.grad[i];
                               });
  return t;
}

Tensor row(const Tensor& x, int i) {
  require(x.ndim() == 2 && i >= 0 && i < x.dim(0), "row: index out of range");
  const int C = x.dim(1);
  std::vector<double> out(x.data() + static_cast<size_t>(i) * C,
                          x.data() + static_cast<size_t>(i + 1) * C);
  Tensor t = Tensor::make_node(
      {C}, std::move(out), {x}, [i, C](TensorImpl& n) {
        if (!pneeds(n, 0)) return;
        auto& g = pgrad(n, 0);
        for (int j = 0; j < C; ++j)
          g[static_cast<size_t>(i) * C + j] += n.grad[j];
      });
  return t;
}

Tensor slice_cols(const Tensor& x, int c0, int c1) {
  require(x.ndim() == 2 && c0 >= 0 && c1 <= x.dim(1) && c0 < c1,
          "slice_cols: bad column range");
  const int N = x.dim(0), C = x.dim(1), Cw = c1 - c0;
  std::vector<double> out(static_cast<size_t>(N) * Cw);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < Cw; ++j)
      out[static_cast<size_t>(i) * Cw + j] =
          x.data()[static_cast<size_t>(i) * C + c0 + j];
  Tensor t = Tensor::make_node(
      {N, Cw}, std::move(out), {x}, [N, C, c0, Cw](TensorImpl& n) {
        if (!pneeds(n, 0)) return;
        auto& g = pgrad(n, 0);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < Cw; ++j)
            g[static_cast<size_t>(i) * C + c0 + j] +=
                n.grad[static_cast<size_t>(i) * Cw + j];
      });
  return t;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps) {
  require(x.ndim() == 2 && gain.ndim() == 1 && bias.ndim() == 1 &&
              gain.dim(0) == x.dim(1) && bias.dim(0) == x.dim(1),
          "layer_norm: expected x [N,D], gain/bias [D]");
  const int N = x.dim(0), D = x.dim(1);
  std::vector<double> out(static_cast<size_t>(N) * D);
  for (int i = 0; i < N; ++i) {
    const double* xr = x.data() + static_cast<size_t>(i) * D;
    double mu = 0.0;
    for (int d = 0; d < D; ++d) mu += xr[d];
    mu /= D;
    double var = 0.0;
    for (int d = 0; d < D; ++d) var += (xr[d] - mu) * (xr[d] - mu);
    var /= D;
    const double inv = 1.0 / std::sqrt(var + eps);
    for (int d = 0; d < D; ++d)
      out[static_cast<size_t>(i) * D + d] =
          (xr[d] - mu) * inv * gain.data()[d] + bias.data()[d];
  }
  Tensor t = Tensor::make_node(
      {N, D}, std::move(out), {x, gain, bias}, [N, D, eps](TensorImpl& n) {
        const double* px = n.parents[0].data();
        const double* pg = n.parents[1].data();
        for (int i = 0; i < N; ++i) {
          const double* xr = px + static_cast<size_t>(i) * D;
          const double* dy = n.grad.data() + static_cast<size_t>(i) * D;
          double mu = 0.0;
          for (int d = 0; d < D; ++d) mu += xr[d];
          mu /= D;
          double var = 0.0;
          for (int d = 0; d < D; ++d) var += (xr[d] - mu) * (xr[d] - mu);
          var /= D;
          const double inv = 1.0 / std::sqrt(var + eps);
          if (pneeds(n, 1) || pneeds(n, 2)) {
            auto& gg = pgrad(n, 1);
            auto& gb = pgrad(n, 2);
            for (int d = 0; d < D; ++d) {
              gg[d] += dy[d] * (xr[d] - mu) * inv;
              gb[d] += dy[d];
            }
          }
          if (pneeds(n, 0)) {
            auto& gx = pgrad(n, 0);
            double m1 = 0.0, m2 = 0.0;
            for (int d = 0; d < D; ++d) {
              const double dxh = dy[d] * pg[d];
              const double xh = (xr[d] - mu) * inv;
              m1 += dxh;
              m2 += dxh * xh;
            }
            m1 /= D;
            m2 /= D;
            for (int d = 0; d < D; ++d) {
              const double dxh = dy[d] * pg[d];
              const double xh = (xr[d] - mu) * inv;
              gx[static_cast<size_t>(i) * D + d] += inv * (dxh - m1 - xh * m2);
            }
          }
        }
      });
  check_finite(t, "layer_norm");
  return t;
}

namespace {

// Shared softmax core over rows of a logical [R,C] view; axis handling is
// done by the callers through strides.
void softmax_rows(const double* x, double* y, int R, int C, int64_t rs,
                  int64_t cs) {
  for (int i = 0; i < R; ++i) {
    const double* xr = x + i * rs;
    double* yr = y + i * rs;
    double mx = xr[0];
    for (int j = 1; j < C; ++j) mx = std::max(mx, xr[j * cs]);
    double z = 0.0;
    for (int j = 0; j < C; ++j) {
      const double e = std::exp(xr[j * cs] - mx);
      yr[j * cs] = e;
      z += e;
    }
    const double invz = 1.0 / z;
    for (int j = 0; j < C; ++j) yr[j * cs] *= invz;
  }
}

}  // namespace

Tensor softmax(const Tensor& x, int axis) {
  require(x.ndim() == 1 || x.ndim() == 2, "softmax: expected 1D or 2D");
  int R, C;
  int64_t rs, cs;
  if (x.ndim() == 1) {
    R = 1;
    C = x.dim(0);
    rs = C;
    cs = 1;
  } else if (axis == 1) {
    R = x.dim(0);
    C = x.dim(1);
    rs = C;
    cs = 1;
  } else if (axis == 0) {
    R = x.dim(1);
    C = x.dim(0);
    rs = 1;
    cs = x.dim(1);
  } else {
    throw std::invalid_argument("softmax: axis must be 0 or 1");
  }
  std::vector<double> out(x.vec().size());
  softmax_rows(x.data(), out.data(), R, C, rs, cs);
  Tensor t = Tensor::make_node(
      x.shape(), std::move(out), {x}, [R, C, rs, cs](TensorImpl& n) {
        if (!pneeds(n, 0)) return;
        auto& gx = pgrad(n, 0);
        for (int i = 0; i < R; ++i) {
          const double* yr = n.data.data() + i * rs;
          const double* gr = n.grad.data() + i * rs;
          double dot = 0.0;
          for (int j = 0; j < C; ++j) dot += yr[j * cs] * gr[j * cs];
          for (int j = 0; j < C; ++j)
            gx[i * rs + j * cs] += yr[j * cs] * (gr[j * cs] - dot);
        }
      });
  check_finite(t, "softmax");
  return t;
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.vec()) acc += v;
  Tensor t = Tensor::make_node({1}, {acc}, {x}, [](TensorImpl& n) {
    if (!pneeds(n, 0)) return;
    auto& g = pgrad(n, 0);
    for (auto& v : g) v += n.grad[0];
  });
  check_finite(t, "sum");
  return t;
}

Tensor mean(const Tensor& x) {
  return mul_scalar(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor bilinear_sample(const Tensor& fm, const Tensor& pts) {
  require(fm.ndim() == 3, "bilinear_sample: feature map must be [C,H,W]");
  require(pts.ndim() == 2 && pts.dim(1) == 2,
          "bilinear_sample: points must be [P,2]");
  require(fm.dim(1) >= 2 && fm.dim(2) >= 2,
          "bilinear_sample: spatial dims must be >= 2");
  for (double v : pts.vec())
    if (!std::isfinite(v))
      throw std::invalid_argument("bilinear_sample: non-finite point");
  const int C = fm.dim(0), H = fm.dim(1), W = fm.dim(2), P = pts.dim(0);
  std::vector<double> out(static_cast<size_t>(P) * C);
  kern::bilinear_gather(fm.data(), C, H, W, pts.data(), P, out.data(), true);
  Tensor t = Tensor::make_node(
      {P, C}, std::move(out), {fm, pts}, [C, H, W, P](TensorImpl& n) {
        if (pneeds(n, 0))
          kern::bilinear_scatter(n.grad.data(), C, H, W, n.parents[1].data(),
                                 P, pgrad(n, 0).data(), true);
        if (pneeds(n, 1))
          kern::bilinear_point_grad(n.grad.data(), n.parents[0].data(), C, H,
                                    W, n.parents[1].data(), P,
                                    pgrad(n, 1).data(), true);
      });
  check_finite(t, "bilinear_sample");
  return t;
}

Tensor trilinear_sample(const Tensor& vol, const Tensor& pts) {
  require(vol.ndim() == 4, "trilinear_sample: volume must be [C,D,H,W]");
  require(pts.ndim() == 2 && pts.dim(1) == 3,
          "trilinear_sample: points must be [P,3]");
  for (double v : pts.vec())
    if (!std::isfinite(v))
      throw std::invalid_argument("trilinear_sample: non-finite point");
  const int C = vol.dim(0), D = vol.dim(1), H = vol.dim(2), W = vol.dim(3);
  const int P = pts.dim(0);
  std::vector<double> out(static_cast<size_t>(P) * C);
  kern::trilinear_gather(vol.data(), C, D, H, W, pts.data(), P, out.data(),
                         true);
  Tensor t = Tensor::make_node(
      {P, C}, std::move(out), {vol, pts}, [C, D, H, W, P](TensorImpl& n) {
        if (pneeds(n, 0))
          kern::trilinear_scatter(n.grad.data(), C, D, H, W,
                                  n.parents[1].data(), P, pgrad(n, 0).data(),
                                  true);
        if (pneeds(n, 1))
          kern::trilinear_point_grad(n.grad.data(), n.parents[0].data(), C, D,
                                     H, W, n.parents[1].data(), P,
                                     pgrad(n, 1).data(), true);
      });
  check_finite(t, "trilinear_sample");
  return t;
}

Tensor conv3d(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(x.ndim() == 4, "conv3d: input must be [Cin,X,Y,Z]");
  require(w.ndim() == 5 && w.dim(2) == 3 && w.dim(3) == 3 && w.dim(4) == 3 &&
              w.dim(1) == x.dim(0),
          "conv3d: weight must be [Cout,Cin,3,3,3]");
  require(b.ndim() == 1 && b.dim(0) == w.dim(0), "conv3d: bad bias shape");
  const int Cin = x.dim(0), X = x.dim(1), Y = x.dim(2), Z = x.dim(3);
  const int Cout = w.dim(0);
  std::vector<double> out(static_cast<size_t>(Cout) * X * Y * Z);
  kern::conv3d_fwd(x.data(), w.data(), b.data(), out.data(), Cin, Cout, X, Y,
                   Z, true);
  Tensor t = Tensor::make_node(
      {Cout, X, Y, Z}, std::move(out), {x, w, b},
      [Cin, Cout, X, Y, Z](TensorImpl& n) {
        double* gx = pneeds(n, 0) ? pgrad(n, 0).data() : nullptr;
        double* gw = pneeds(n, 1) ? pgrad(n, 1).data() : nullptr;
        double* gb = pneeds(n, 2) ? pgrad(n, 2).data() : nullptr;
        kern::conv3d_bwd(n.parents[0].data(), n.parents[1].data(),
                         n.grad.data(), gx, gw, gb, Cin, Cout, X, Y, Z, true);
      });
  check_finite(t, "conv3d");
  return t;
}

Tensor weighted_head_sum(const Tensor& samples, const Tensor& weights,
                         const std::vector<int>& head_of_k, int heads) {
  require(samples.ndim() == 2 && weights.ndim() == 2,
          "weighted_head_sum: expected samples [Nq*K,D], weights [Nq,K]");
  const int Nq = weights.dim(0), K = weights.dim(1), D = samples.dim(1);
  require(samples.dim(0) == Nq * K,
          "weighted_head_sum: samples/weights row mismatch");
  require(static_cast<int>(head_of_k.size()) == K && D % heads == 0,
          "weighted_head_sum: bad head layout");
  const int Dh = D / heads;
  std::vector<double> out(static_cast<size_t>(Nq) * D, 0.0);
  for (int q = 0; q < Nq; ++q) {
    double* orow = out.data() + static_cast<size_t>(q) * D;
    for (int k = 0; k < K; ++k) {
      const double wv = weights.data()[static_cast<size_t>(q) * K + k];
      const double* srow =
          samples.data() + (static_cast<size_t>(q) * K + k) * D;
      const int d0 = head_of_k[k] * Dh;
      for (int d = d0; d < d0 + Dh; ++d) orow[d] += wv * srow[d];
    }
  }
  auto head_of = head_of_k;
  Tensor t = Tensor::make_node(
      {Nq, D}, std::move(out), {samples, weights},
      [Nq, K, D, Dh, head_of](TensorImpl& n) {
        const double* ps = n.parents[0].data();
        const double* pw = n.parents[1].data();
        for (int q = 0; q < Nq; ++q) {
          const double* grow = n.grad.data() + static_cast<size_t>(q) * D;
          for (int k = 0; k < K; ++k) {
            const size_t srow = (static_cast<size_t>(q) * K + k) * D;
            const int d0 = head_of[k] * Dh;
            if (pneeds(n, 0)) {
              auto& gs = pgrad(n, 0);
              const double wv = pw[static_cast<size_t>(q) * K + k];
              for (int d = d0; d < d0 + Dh; ++d)
                gs[srow + d] += wv * grow[d];
            }
            if (pneeds(n, 1)) {
              double acc = 0.0;
              for (int d = d0; d < d0 + Dh; ++d)
                acc += ps[srow + d] * grow[d];
              pgrad(n, 1)[static_cast<size_t>(q) * K + k] += acc;
            }
          }
        }
      });
  check_finite(t, "weighted_head_sum");
  return t;
}

}  // namespace vslice
