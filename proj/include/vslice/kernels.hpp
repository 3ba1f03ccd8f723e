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

#pragma once

#include <cstdint>

namespace vslice::kern {

// Raw dense kernels behind the tensor ops. Every kernel has an OpenMP path
// and a serial path selected by `parallel`; parallel loops are partitioned so
// each output element is written by exactly one iteration, which keeps
// results bit-identical for any thread count. The serial path is the
// reference used by the unit tests and the kernel benchmark.

// C[M,N] = A[M,K] * B[K,N]   (accumulate: +=)
void matmul(const double* A, const double* B, double* C, int M, int K, int N,
            bool accumulate, bool parallel);
// C[M,N] = A[M,K] * B[N,K]^T
void matmul_nt(const double* A, const double* B, double* C, int M, int K,
               int N, bool accumulate, bool parallel);
// C[K,N] = A[M,K]^T * B[M,N]
void matmul_tn(const double* A, const double* B, double* C, int M, int K,
               int N, bool accumulate, bool parallel);

// Bilinear sampling of fm[C,H,W] at P points (row_frac, col_frac) in [0,1]
// with align-corners mapping (0 = first texel center, 1 = last texel center)
// and zero padding outside the lattice. out is [P,C].
void bilinear_gather(const double* fm, int C, int H, int W, const double* pts,
                     int P, double* out, bool parallel);
// Accumulates d(out)/d(fm): gfm[C,H,W] += scatter of gout[P,C].
void bilinear_scatter(const double* gout, int C, int H, int W,
                      const double* pts, int P, double* gfm, bool parallel);
// Accumulates d(out)/d(pts) into gpts[P,2].
void bilinear_point_grad(const double* gout, const double* fm, int C, int H,
                         int W, const double* pts, int P, double* gpts,
                         bool parallel);

// Trilinear analogue over vol[C,D,H,W] at points (d_frac, row_frac, col_frac).
void trilinear_gather(const double* vol, int C, int D, int H, int W,
                      const double* pts, int P, double* out, bool parallel);
void trilinear_scatter(const double* gout, int C, int D, int H, int W,
                       const double* pts, int P, double* gvol, bool parallel);
void trilinear_point_grad(const double* gout, const double* vol, int C, int D,
                          int H, int W, const double* pts, int P, double* gpts,
                          bool parallel);

// 3D convolution, kernel 3, padding 1, stride 1.
// x[Cin,X,Y,Z], w[Cout,Cin,3,3,3], b[Cout], out[Cout,X,Y,Z].
void conv3d_fwd(const double* x, const double* w, const double* b, double* out,
                int Cin, int Cout, int X, int Y, int Z, bool parallel);
// Accumulates into gx, gw, gb (any of them may be null to skip).
void conv3d_bwd(const double* x, const double* w, const double* gout,
                double* gx, double* gw, double* gb, int Cin, int Cout, int X,
                int Y, int Z, bool parallel);

namespace serial {
void matmul(const double* A, const double* B, double* C, int M, int K, int N);
void bilinear_gather(const double* fm, int C, int H, int W, const double* pts,
                     int P, double* out);
void trilinear_gather(const double* vol, int C, int D, int H, int W,
                      const double* pts, int P, double* out);
void conv3d_fwd(const double* x, const double* w, const double* b, double* out,
                int Cin, int Cout, int X, int Y, int Z);
}  // namespace serial

}  // namespace vslice::kern
