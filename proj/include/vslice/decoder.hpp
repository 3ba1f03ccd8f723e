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

#include <string>
#include <vector>

#include "vslice/geometry.hpp"
#include "vslice/ops.hpp"
#include "vslice/tensor.hpp"

namespace vslice {

/// One deformable-attention operator. Offsets and attention logits are
/// predicted from the query; sampling walks ref + offset per
/// (level, head, reference, point). Offset and attention projections start
/// at zero so the first pass samples exactly at the reference points with
/// uniform weights.
struct DeformAttnParams {
  int D = 0;
  int heads = 1;
  int points = 1;  // points per (head, level, reference)
  int levels = 1;
  int refs = 1;    // reference points per query

  Tensor w_off, b_off;  // [K*2, D], [K*2]
  Tensor w_att, b_att;  // [K, D], [K]
  Tensor w_val, b_val;  // [D, D], [D]
  Tensor w_out, b_out;  // [D, D], [D]

  int samples_per_level() const { return heads * refs * points; }
  int K() const { return levels * samples_per_level(); }

  static DeformAttnParams create(ParamStore& params, const std::string& prefix,
                                 int D, int heads, int points, int levels,
                                 int refs, Rng& rng);
};

/// Applies the value projection of `p` to a [C,H,W] feature map.
Tensor project_value_map(const Tensor& fm, const Tensor& w, const Tensor& b);

/// query [Nq,D]; refs [Nq*R, 2] normalized (shared across levels); values:
/// one [D,Hl,Wl] map per level (raw, or already value-projected when
/// `values_preprojected`). ref_mask, when given, marks invalid references
/// (Nq*R entries); their attention weight is suppressed before the softmax.
/// With `apply_out_proj` false the output projection is left to the caller
/// (used to average over views before projecting once).
Tensor deformable_attention(const Tensor& query, const Tensor& refs,
                            const std::vector<Tensor>& values,
                            const DeformAttnParams& p,
                            const std::vector<uint8_t>* ref_mask = nullptr,
                            bool values_preprojected = false,
                            bool apply_out_proj = true);

/// Reshapes plane queries [W*L, D] (token t = ix*L + iy) into a [D, W, L]
/// feature map for use as attention values.
Tensor plane_to_featmap(const Tensor& q, int W, int L);

struct LayerParams {
  Tensor ln_pca_g, ln_pca_b;
  Tensor ln_ssca_g, ln_ssca_b;
  Tensor ln_ffn_g, ln_ffn_b;
  DeformAttnParams pca;   // refs = 1, levels = 1
  DeformAttnParams ssca;  // refs = N_r3d, levels = feature levels
  Tensor ffn_w1, ffn_b1, ffn_w2, ffn_b2;

  static LayerParams create(ParamStore& params, const std::string& prefix,
                            int D, int heads, int points, int levels,
                            int n_r3d, int ffn_hidden, Rng& rng);
};

/// Per (slice level, plane role, view) reference data for SSCA; constants
/// derived from the camera geometry.
struct ViewRefs {
  Tensor refs;                    // [Nq*R, 2], masked entries parked at 0.5
  std::vector<uint8_t> ref_mask;  // Nq*R, 1 = projected inside the view
  std::vector<double> token_hit;  // Nq, 1.0 if any reference hits
  bool any_hit = false;
};

/// Two-stage planar cross-attention for one slice level: floor tokens attend
/// to the ceiling plane, then ceiling tokens attend to the already-updated
/// floor plane. Residual around each stage; pre-norm on the query.
void pca_level(Tensor& floor_q, Tensor& ceil_q, const Tensor& planar_refs,
               const LayerParams& lp, int W, int L);

/// Sliced spatial cross-attention for one plane: deformable attention
/// against every view whose pillar references hit, averaged over the hit
/// set. Tokens with an empty hit set pass through unchanged.
void ssca_plane(Tensor& q, const std::vector<ViewRefs>& per_view,
                const std::vector<std::vector<Tensor>>& view_values,
                const LayerParams& lp);

/// Shared two-layer FFN with residual and pre-norm.
void ffn_plane(Tensor& q, const LayerParams& lp);

}  // namespace vslice
