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

#include <vector>

#include "vslice/tensor.hpp"

namespace vslice {

// Elementwise.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);
Tensor relu(const Tensor& a);
/// log(max(x, eps)); entries at or below eps get zero gradient.
Tensor log_clamped(const Tensor& a, double eps = 1e-12);

// Broadcasting helpers for [N,D] matrices.
Tensor add_rowvec(const Tensor& x, const Tensor& v);   // v: [D]
Tensor scale_rows(const Tensor& x, const Tensor& v);   // v: [N]

// Linear algebra.
Tensor matmul(const Tensor& a, const Tensor& b);
/// y = x * w^T + b with x [N,Din], w [Dout,Din], b [Dout].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor transpose(const Tensor& x);
Tensor reshape(const Tensor& x, std::vector<int> shape);
Tensor row(const Tensor& x, int i);
Tensor slice_cols(const Tensor& x, int c0, int c1);

// Normalizations and reductions.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-6);
/// 2D softmax along axis (1 = per row, 0 = per column), stabilized by max
/// subtraction. 1D inputs are normalized as a single row.
Tensor softmax(const Tensor& x, int axis = 1);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Sampling. Points are normalized to [0,1] per axis with align-corners
// semantics: 0 is the center of the first texel, 1 the center of the last.
// Lattice cells outside the grid contribute zero (zero padding), so points
// past the border fade to zero over one texel. Differentiable in both the
// feature map and the points.
Tensor bilinear_sample(const Tensor& fm, const Tensor& pts);   // [C,H,W],[P,2]
Tensor trilinear_sample(const Tensor& vol, const Tensor& pts); // [C,D,H,W],[P,3]

/// 3D convolution, kernel 3, padding 1: x [Cin,X,Y,Z], w [Cout,Cin,3,3,3].
Tensor conv3d(const Tensor& x, const Tensor& w, const Tensor& b);

/// Attention aggregation: samples [Nq*K, D] (K samples per query, row-major
/// by query), weights [Nq, K]. Sample k is owned by head head_of_k[k]; head h
/// contributes only to its channel block of width D/heads.
/// out[n,d] = sum_k weights[n,k] * samples[n*K+k, d] * own(k,d).
Tensor weighted_head_sum(const Tensor& samples, const Tensor& weights,
                         const std::vector<int>& head_of_k, int heads);

}  // namespace vslice
