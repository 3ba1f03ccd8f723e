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

#include "vslice/kernels.hpp"

#include <cmath>
#include <cstring>

namespace vslice::kern {

void matmul(const double* A, const double* B, double* C, int M, int K, int N,
            bool accumulate, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int m = 0; m < M; ++m) {
    double* crow = C + static_cast<int64_t>(m) * N;
    if (!accumulate)
      for (int n = 0; n < N; ++n) crow[n] = 0.0;
    const double* arow = A + static_cast<int64_t>(m) * K;
    for (int k = 0; k < K; ++k) {
      const double a = arow[k];
      const double* brow = B + static_cast<int64_t>(k) * N;
      for (int n = 0; n < N; ++n) crow[n] += a * brow[n];
    }
  }
}

void matmul_nt(const double* A, const double* B, double* C, int M, int K,
               int N, bool accumulate, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int m = 0; m < M; ++m) {
    const double* arow = A + static_cast<int64_t>(m) * K;
    double* crow = C + static_cast<int64_t>(m) * N;
    for (int n = 0; n < N; ++n) {
      const double* brow = B + static_cast<int64_t>(n) * K;
      double acc = 0.0;
      for (int k = 0; k < K; ++k) acc += arow[k] * brow[k];
      if (accumulate)
        crow[n] += acc;
      else
        crow[n] = acc;
    }
  }
}

void matmul_tn(const double* A, const double* B, double* C, int M, int K,
               int N, bool accumulate, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < K; ++k) {
    double* crow = C + static_cast<int64_t>(k) * N;
    if (!accumulate)
      for (int n = 0; n < N; ++n) crow[n] = 0.0;
    for (int m = 0; m < M; ++m) {
      const double a = A[static_cast<int64_t>(m) * K + k];
      const double* brow = B + static_cast<int64_t>(m) * N;
      for (int n = 0; n < N; ++n) crow[n] += a * brow[n];
    }
  }
}

namespace {

struct Corner {
  int idx;      // flat spatial offset, -1 if outside
  double w;
};

// Corner decomposition of one bilinear sample. Returns the 4 (index, weight)
// pairs over the H*W plane; outside corners get idx = -1.
inline void bilinear_corners(double pr, double pc, int H, int W, Corner c[4],
                             double* fr_out = nullptr,
                             double* fc_out = nullptr, int* i0_out = nullptr,
                             int* j0_out = nullptr) {
  const double r = pr * (H - 1);
  const double cc = pc * (W - 1);
  const double fi = std::floor(r);
  const double fj = std::floor(cc);
  const int i0 = static_cast<int>(fi);
  const int j0 = static_cast<int>(fj);
  const double fr = r - fi;
  const double fc = cc - fj;
  const int is[2] = {i0, i0 + 1};
  const int js[2] = {j0, j0 + 1};
  const double wr[2] = {1.0 - fr, fr};
  const double wc[2] = {1.0 - fc, fc};
  int k = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const bool in =
          is[a] >= 0 && is[a] < H && js[b] >= 0 && js[b] < W;
      c[k].idx = in ? is[a] * W + js[b] : -1;
      c[k].w = wr[a] * wc[b];
      ++k;
    }
  if (fr_out) *fr_out = fr;
  if (fc_out) *fc_out = fc;
  if (i0_out) *i0_out = i0;
  if (j0_out) *j0_out = j0;
}

}  // namespace

void bilinear_gather(const double* fm, int C, int H, int W, const double* pts,
                     int P, double* out, bool parallel) {
  const int64_t plane = static_cast<int64_t>(H) * W;
#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < P; ++p) {
    Corner c[4];
    bilinear_corners(pts[2 * p], pts[2 * p + 1], H, W, c);
    double* orow = out + static_cast<int64_t>(p) * C;
    for (int ch = 0; ch < C; ++ch) {
      const double* chan = fm + ch * plane;
      double acc = 0.0;
      for (int k = 0; k < 4; ++k)
        if (c[k].idx >= 0) acc += c[k].w * chan[c[k].idx];
      orow[ch] = acc;
    }
  }
}

void bilinear_scatter(const double* gout, int C, int H, int W,
                      const double* pts, int P, double* gfm, bool parallel) {
  const int64_t plane = static_cast<int64_t>(H) * W;
  // Partitioned by channel: each channel plane is written by one iteration,
  // with points visited in ascending order (same order as the serial sweep).
#pragma omp parallel for schedule(static) if (parallel)
  for (int ch = 0; ch < C; ++ch) {
    double* gchan = gfm + ch * plane;
    for (int p = 0; p < P; ++p) {
      Corner c[4];
      bilinear_corners(pts[2 * p], pts[2 * p + 1], H, W, c);
      const double g = gout[static_cast<int64_t>(p) * C + ch];
      for (int k = 0; k < 4; ++k)
        if (c[k].idx >= 0) gchan[c[k].idx] += c[k].w * g;
    }
  }
}

void bilinear_point_grad(const double* gout, const double* fm, int C, int H,
                         int W, const double* pts, int P, double* gpts,
                         bool parallel) {
  const int64_t plane = static_cast<int64_t>(H) * W;
#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < P; ++p) {
    const double r = pts[2 * p] * (H - 1);
    const double cc = pts[2 * p + 1] * (W - 1);
    const int i0 = static_cast<int>(std::floor(r));
    const int j0 = static_cast<int>(std::floor(cc));
    const double fr = r - std::floor(r);
    const double fc = cc - std::floor(cc);
    const int is[2] = {i0, i0 + 1};
    const int js[2] = {j0, j0 + 1};
    const double wr[2] = {1.0 - fr, fr};
    const double wc[2] = {1.0 - fc, fc};
    const double dwr[2] = {-1.0, 1.0};  // d wr / d fr
    double dr = 0.0, dc = 0.0;
    const double* grow = gout + static_cast<int64_t>(p) * C;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        if (is[a] < 0 || is[a] >= H || js[b] < 0 || js[b] >= W) continue;
        const int idx = is[a] * W + js[b];
        double gv = 0.0;
        for (int ch = 0; ch < C; ++ch) gv += grow[ch] * fm[ch * plane + idx];
        dr += dwr[a] * wc[b] * gv;
        dc += wr[a] * dwr[b] * gv;
      }
    gpts[2 * p] += dr * (H - 1);
    gpts[2 * p + 1] += dc * (W - 1);
  }
}

void trilinear_gather(const double* vol, int C, int D, int H, int W,
                      const double* pts, int P, double* out, bool parallel) {
  const int64_t cell = static_cast<int64_t>(D) * H * W;
#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < P; ++p) {
    const double z = pts[3 * p] * (D - 1);
    const double r = pts[3 * p + 1] * (H - 1);
    const double cc = pts[3 * p + 2] * (W - 1);
    const int k0 = static_cast<int>(std::floor(z));
    const int i0 = static_cast<int>(std::floor(r));
    const int j0 = static_cast<int>(std::floor(cc));
    const double fz = z - std::floor(z);
    const double fr = r - std::floor(r);
    const double fc = cc - std::floor(cc);
    const int ks[2] = {k0, k0 + 1};
    const int is[2] = {i0, i0 + 1};
    const int js[2] = {j0, j0 + 1};
    const double wz[2] = {1.0 - fz, fz};
    const double wr[2] = {1.0 - fr, fr};
    const double wc[2] = {1.0 - fc, fc};
    double* orow = out + static_cast<int64_t>(p) * C;
    for (int ch = 0; ch < C; ++ch) orow[ch] = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d) {
          if (ks[a] < 0 || ks[a] >= D || is[b] < 0 || is[b] >= H ||
              js[d] < 0 || js[d] >= W)
            continue;
          const int64_t idx =
              (static_cast<int64_t>(ks[a]) * H + is[b]) * W + js[d];
          const double w = wz[a] * wr[b] * wc[d];
          for (int ch = 0; ch < C; ++ch)
            orow[ch] += w * vol[ch * cell + idx];
        }
  }
}

void trilinear_scatter(const double* gout, int C, int D, int H, int W,
                       const double* pts, int P, double* gvol, bool parallel) {
  const int64_t cell = static_cast<int64_t>(D) * H * W;
#pragma omp parallel for schedule(static) if (parallel)
  for (int ch = 0; ch < C; ++ch) {
    double* gchan = gvol + ch * cell;
    for (int p = 0; p < P; ++p) {
      const double z = pts[3 * p] * (D - 1);
      const double r = pts[3 * p + 1] * (H - 1);
      const double cc = pts[3 * p + 2] * (W - 1);
      const int k0 = static_cast<int>(std::floor(z));
      const int i0 = static_cast<int>(std::floor(r));
      const int j0 = static_cast<int>(std::floor(cc));
      const double fz = z - std::floor(z);
      const double fr = r - std::floor(r);
      const double fc = cc - std::floor(cc);
      const int ks[2] = {k0, k0 + 1};
      const int is[2] = {i0, i0 + 1};
      const int js[2] = {j0, j0 + 1};
      const double wz[2] = {1.0 - fz, fz};
      const double wr[2] = {1.0 - fr, fr};
      const double wc[2] = {1.0 - fc, fc};
      const double g = gout[static_cast<int64_t>(p) * C + ch];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int d = 0; d < 2; ++d) {
            if (ks[a] < 0 || ks[a] >= D || is[b] < 0 || is[b] >= H ||
                js[d] < 0 || js[d] >= W)
              continue;
            const int64_t idx =
                (static_cast<int64_t>(ks[a]) * H + is[b]) * W + js[d];
            gchan[idx] += wz[a] * wr[b] * wc[d] * g;
          }
    }
  }
}

void trilinear_point_grad(const double* gout, const double* vol, int C, int D,
                          int H, int W, const double* pts, int P, double* gpts,
                          bool parallel) {
  const int64_t cell = static_cast<int64_t>(D) * H * W;
#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < P; ++p) {
    const double z = pts[3 * p] * (D - 1);
    const double r = pts[3 * p + 1] * (H - 1);
    const double cc = pts[3 * p + 2] * (W - 1);
    const int k0 = static_cast<int>(std::floor(z));
    const int i0 = static_cast<int>(std::floor(r));
    const int j0 = static_cast<int>(std::floor(cc));
    const double fz = z - std::floor(z);
    const double fr = r - std::floor(r);
    const double fc = cc - std::floor(cc);
    const int ks[2] = {k0, k0 + 1};
    const int is[2] = {i0, i0 + 1};
    const int js[2] = {j0, j0 + 1};
    const double wz[2] = {1.0 - fz, fz};
    const double wr[2] = {1.0 - fr, fr};
    const double wc[2] = {1.0 - fc, fc};
    const double dw[2] = {-1.0, 1.0};
    double dz = 0.0, dr = 0.0, dc = 0.0;
    const double* grow = gout + static_cast<int64_t>(p) * C;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d) {
          if (ks[a] < 0 || ks[a] >= D || is[b] < 0 || is[b] >= H ||
              js[d] < 0 || js[d] >= W)
            continue;
          const int64_t idx =
              (static_cast<int64_t>(ks[a]) * H + is[b]) * W + js[d];
          double gv = 0.0;
          for (int ch = 0; ch < C; ++ch) gv += grow[ch] * vol[ch * cell + idx];
          dz += dw[a] * wr[b] * wc[d] * gv;
          dr += wz[a] * dw[b] * wc[d] * gv;
          dc += wz[a] * wr[b] * dw[d] * gv;
        }
    gpts[3 * p] += dz * (D - 1);
    gpts[3 * p + 1] += dr * (H - 1);
    gpts[3 * p + 2] += dc * (W - 1);
  }
}

void conv3d_fwd(const double* x, const double* w, const double* b, double* out,
                int Cin, int Cout, int X, int Y, int Z, bool parallel) {
  const int64_t vox = static_cast<int64_t>(X) * Y * Z;
#pragma omp parallel for schedule(static) if (parallel)
  for (int co = 0; co < Cout; ++co) {
    double* oc = out + co * vox;
    for (int64_t i = 0; i < vox; ++i) oc[i] = b ? b[co] : 0.0;
    for (int ci = 0; ci < Cin; ++ci) {
      const double* xc = x + ci * vox;
      const double* wc = w + (static_cast<int64_t>(co) * Cin + ci) * 27;
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            const double ww = wc[((dx + 1) * 3 + (dy + 1)) * 3 + (dz + 1)];
            if (ww == 0.0) continue;
            const int x0 = dx < 0 ? 1 : 0, x1 = dx > 0 ? X - 1 : X;
            const int y0 = dy < 0 ? 1 : 0, y1 = dy > 0 ? Y - 1 : Y;
            const int z0 = dz < 0 ? 1 : 0, z1 = dz > 0 ? Z - 1 : Z;
            for (int xx = x0; xx < x1; ++xx)
              for (int yy = y0; yy < y1; ++yy) {
                double* orow = oc + (static_cast<int64_t>(xx) * Y + yy) * Z;
                const double* xrow =
                    xc + (static_cast<int64_t>(xx + dx) * Y + (yy + dy)) * Z +
                    dz;
                for (int zz = z0; zz < z1; ++zz)
                  orow[zz] += ww * xrow[zz];
              }
          }
    }
  }
}

void conv3d_bwd(const double* x, const double* w, const double* gout,
                double* gx, double* gw, double* gb, int Cin, int Cout, int X,
                int Y, int Z, bool parallel) {
  const int64_t vox = static_cast<int64_t>(X) * Y * Z;
  if (gx) {
#pragma omp parallel for schedule(static) if (parallel)
    for (int ci = 0; ci < Cin; ++ci) {
      double* gc = gx + ci * vox;
      for (int co = 0; co < Cout; ++co) {
        const double* goc = gout + co * vox;
        const double* wc = w + (static_cast<int64_t>(co) * Cin + ci) * 27;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              const double ww = wc[((dx + 1) * 3 + (dy + 1)) * 3 + (dz + 1)];
              if (ww == 0.0) continue;
              // gx[ci, p] += w * gout[co, p - d]
              const int x0 = dx > 0 ? 1 : 0, x1 = dx < 0 ? X - 1 : X;
              const int y0 = dy > 0 ? 1 : 0, y1 = dy < 0 ? Y - 1 : Y;
              const int z0 = dz > 0 ? 1 : 0, z1 = dz < 0 ? Z - 1 : Z;
              for (int xx = x0; xx < x1; ++xx)
                for (int yy = y0; yy < y1; ++yy) {
                  double* grow = gc + (static_cast<int64_t>(xx) * Y + yy) * Z;
                  const double* gorow =
                      goc +
                      (static_cast<int64_t>(xx - dx) * Y + (yy - dy)) * Z - dz;
                  for (int zz = z0; zz < z1; ++zz)
                    grow[zz] += ww * gorow[zz];
                }
            }
      }
    }
  }
  if (gw || gb) {
#pragma omp parallel for schedule(static) if (parallel)
    for (int co = 0; co < Cout; ++co) {
      const double* goc = gout + co * vox;
      if (gb) {
        double acc = 0.0;
        for (int64_t i = 0; i < vox; ++i) acc += goc[i];
        gb[co] += acc;
      }
      if (!gw) continue;
      for (int ci = 0; ci < Cin; ++ci) {
        const double* xc = x + ci * vox;
        double* gwc = gw + (static_cast<int64_t>(co) * Cin + ci) * 27;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              const int x0 = dx < 0 ? 1 : 0, x1 = dx > 0 ? X - 1 : X;
              const int y0 = dy < 0 ? 1 : 0, y1 = dy > 0 ? Y - 1 : Y;
              const int z0 = dz < 0 ? 1 : 0, z1 = dz > 0 ? Z - 1 : Z;
              double acc = 0.0;
              for (int xx = x0; xx < x1; ++xx)
                for (int yy = y0; yy < y1; ++yy) {
                  const double* gorow =
                      goc + (static_cast<int64_t>(xx) * Y + yy) * Z;
                  const double* xrow =
                      xc +
                      (static_cast<int64_t>(xx + dx) * Y + (yy + dy)) * Z + dz;
                  for (int zz = z0; zz < z1; ++zz)
                    acc += gorow[zz] * xrow[zz];
                }
              gwc[((dx + 1) * 3 + (dy + 1)) * 3 + (dz + 1)] += acc;
            }
      }
    }
  }
}

// Naive textbook forms, kept as an independent reference for the unit tests
// and the kernel benchmark.
namespace serial {

void matmul(const double* A, const double* B, double* C, int M, int K,
            int N) {
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n) {
      double acc = 0.0;
      for (int k = 0; k < K; ++k)
        acc += A[static_cast<int64_t>(m) * K + k] *
               B[static_cast<int64_t>(k) * N + n];
      C[static_cast<int64_t>(m) * N + n] = acc;
    }
}

namespace {
inline double texel_or_zero(const double* plane, int H, int W, int i, int j) {
  if (i < 0 || i >= H || j < 0 || j >= W) return 0.0;
  return plane[static_cast<int64_t>(i) * W + j];
}
}  // namespace

void bilinear_gather(const double* fm, int C, int H, int W, const double* pts,
                     int P, double* out) {
  for (int p = 0; p < P; ++p) {
    const double r = pts[2 * p] * (H - 1);
    const double c = pts[2 * p + 1] * (W - 1);
    const int i0 = static_cast<int>(std::floor(r));
    const int j0 = static_cast<int>(std::floor(c));
    const double fr = r - std::floor(r);
    const double fc = c - std::floor(c);
    for (int ch = 0; ch < C; ++ch) {
      const double* plane = fm + static_cast<int64_t>(ch) * H * W;
      const double v00 = texel_or_zero(plane, H, W, i0, j0);
      const double v01 = texel_or_zero(plane, H, W, i0, j0 + 1);
      const double v10 = texel_or_zero(plane, H, W, i0 + 1, j0);
      const double v11 = texel_or_zero(plane, H, W, i0 + 1, j0 + 1);
      out[static_cast<int64_t>(p) * C + ch] =
          (1.0 - fr) * ((1.0 - fc) * v00 + fc * v01) +
          fr * ((1.0 - fc) * v10 + fc * v11);
    }
  }
}

void trilinear_gather(const double* vol, int C, int D, int H, int W,
                      const double* pts, int P, double* out) {
  for (int p = 0; p < P; ++p) {
    const double z = pts[3 * p] * (D - 1);
    const double r = pts[3 * p + 1] * (H - 1);
    const double c = pts[3 * p + 2] * (W - 1);
    const int k0 = static_cast<int>(std::floor(z));
    const int i0 = static_cast<int>(std::floor(r));
    const int j0 = static_cast<int>(std::floor(c));
    const double fz = z - std::floor(z);
    const double fr = r - std::floor(r);
    const double fc = c - std::floor(c);
    for (int ch = 0; ch < C; ++ch) {
      const double* grid = vol + static_cast<int64_t>(ch) * D * H * W;
      double acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int d = 0; d < 2; ++d) {
            const int kk = k0 + a, ii = i0 + b, jj = j0 + d;
            if (kk < 0 || kk >= D || ii < 0 || ii >= H || jj < 0 || jj >= W)
              continue;
            const double w = (a ? fz : 1.0 - fz) * (b ? fr : 1.0 - fr) *
                             (d ? fc : 1.0 - fc);
            acc += w * grid[(static_cast<int64_t>(kk) * H + ii) * W + jj];
          }
      out[static_cast<int64_t>(p) * C + ch] = acc;
    }
  }
}

void conv3d_fwd(const double* x, const double* w, const double* b, double* out,
                int Cin, int Cout, int X, int Y, int Z) {
  const int64_t vox = static_cast<int64_t>(X) * Y * Z;
  for (int co = 0; co < Cout; ++co)
    for (int xx = 0; xx < X; ++xx)
      for (int yy = 0; yy < Y; ++yy)
        for (int zz = 0; zz < Z; ++zz) {
          double acc = b ? b[co] : 0.0;
          for (int ci = 0; ci < Cin; ++ci)
            for (int dx = -1; dx <= 1; ++dx)
              for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                  const int px = xx + dx, py = yy + dy, pz = zz + dz;
                  if (px < 0 || px >= X || py < 0 || py >= Y || pz < 0 ||
                      pz >= Z)
                    continue;
                  acc += w[(static_cast<int64_t>(co) * Cin + ci) * 27 +
                           ((dx + 1) * 3 + (dy + 1)) * 3 + (dz + 1)] *
                         x[ci * vox + (static_cast<int64_t>(px) * Y + py) * Z +
                           pz];
                }
          out[co * vox + (static_cast<int64_t>(xx) * Y + yy) * Z + zz] = acc;
        }
}

}  // namespace serial

}  // namespace vslice::kern
