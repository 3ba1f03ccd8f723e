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

#include "vslice/decoder.hpp"

#include <cmath>
#include <stdexcept>

namespace vslice {

DeformAttnParams DeformAttnParams::create(ParamStore& params,
                                          const std::string& prefix, int D,
                                          int heads, int points, int levels,
                                          int refs, Rng& rng) {
  if (D <= 0 || heads <= 0 || points <= 0 || levels <= 0 || refs <= 0)
    throw std::invalid_argument("DeformAttnParams: sizes must be positive");
  if (D % heads != 0)
    throw std::invalid_argument("DeformAttnParams: D must divide by heads");
  DeformAttnParams p;
  p.D = D;
  p.heads = heads;
  p.points = points;
  p.levels = levels;
  p.refs = refs;
  const int K = p.K();
  const double bound = 1.0 / std::sqrt(static_cast<double>(D));
  p.w_off = params.add(prefix + ".off.w", Tensor::zeros({K * 2, D}));
  p.b_off = params.add(prefix + ".off.b", Tensor::zeros({K * 2}));
  p.w_att = params.add(prefix + ".att.w", Tensor::zeros({K, D}));
  p.b_att = params.add(prefix + ".att.b", Tensor::zeros({K}));
  p.w_val = params.add(prefix + ".val.w", Tensor::uniform({D, D}, bound, rng));
  p.b_val = params.add(prefix + ".val.b", Tensor::uniform({D}, bound, rng));
  p.w_out = params.add(prefix + ".out.w", Tensor::uniform({D, D}, bound, rng));
  p.b_out = params.add(prefix + ".out.b", Tensor::uniform({D}, bound, rng));
  return p;
}

Tensor project_value_map(const Tensor& fm, const Tensor& w, const Tensor& b) {
  if (fm.ndim() != 3)
    throw std::invalid_argument("project_value_map: expected [C,H,W]");
  const int C = fm.dim(0), H = fm.dim(1), W = fm.dim(2);
  Tensor flat = reshape(fm, {C, H * W});
  Tensor proj = linear(transpose(flat), w, b);  // [H*W, D]
  return reshape(transpose(proj), {w.dim(0), H, W});
}

namespace {

// Expands constant reference points [Nq*R, 2] into per-level sampling bases
// [Nq, Kl*2] following the (head, ref, point) order within the level block.
Tensor expand_refs(const Tensor& refs, int Nq, const DeformAttnParams& p) {
  const int R = p.refs, P = p.points, H = p.heads;
  const int Kl = p.samples_per_level();
  std::vector<double> out(static_cast<size_t>(Nq) * Kl * 2);
  const double* src = refs.data();
  for (int n = 0; n < Nq; ++n) {
    double* row = out.data() + static_cast<size_t>(n) * Kl * 2;
    for (int h = 0; h < H; ++h)
      for (int r = 0; r < R; ++r)
        for (int pt = 0; pt < P; ++pt) {
          const int k = (h * R + r) * P + pt;
          row[2 * k] = src[2 * (static_cast<size_t>(n) * R + r)];
          row[2 * k + 1] = src[2 * (static_cast<size_t>(n) * R + r) + 1];
        }
  }
  return Tensor::from_data({Nq, Kl * 2}, std::move(out));
}

// -1e9 bias on attention logits of masked references, replicated over
// (level, head, point).
Tensor mask_bias(const std::vector<uint8_t>& ref_mask, int Nq,
                 const DeformAttnParams& p) {
  const int R = p.refs, P = p.points, H = p.heads, Lv = p.levels;
  const int K = p.K(), Kl = p.samples_per_level();
  std::vector<double> out(static_cast<size_t>(Nq) * K, 0.0);
  for (int n = 0; n < Nq; ++n)
    for (int r = 0; r < R; ++r) {
      if (ref_mask[static_cast<size_t>(n) * R + r]) continue;
      for (int l = 0; l < Lv; ++l)
        for (int h = 0; h < H; ++h)
          for (int pt = 0; pt < P; ++pt)
            out[static_cast<size_t>(n) * K + l * Kl + (h * R + r) * P + pt] =
                -1e9;
    }
  return Tensor::from_data({Nq, K}, std::move(out));
}

}  // namespace

Tensor deformable_attention(const Tensor& query, const Tensor& refs,
                            const std::vector<Tensor>& values,
                            const DeformAttnParams& p,
                            const std::vector<uint8_t>* ref_mask,
                            bool values_preprojected, bool apply_out_proj) {
  const int Nq = query.dim(0);
  if (query.dim(1) != p.D)
    throw std::invalid_argument("deformable_attention: query width != D");
  if (refs.numel() != static_cast<int64_t>(Nq) * p.refs * 2)
    throw std::invalid_argument("deformable_attention: bad ref count");
  if (static_cast<int>(values.size()) != p.levels)
    throw std::invalid_argument("deformable_attention: bad level count");
  if (ref_mask && static_cast<int>(ref_mask->size()) !=
                      Nq * p.refs)
    throw std::invalid_argument("deformable_attention: bad mask size");

  const int Kl = p.samples_per_level();
  Tensor off = linear(query, p.w_off, p.b_off);     // [Nq, K*2]
  Tensor logits = linear(query, p.w_att, p.b_att);  // [Nq, K]
  if (ref_mask) logits = add(logits, mask_bias(*ref_mask, Nq, p));
  Tensor w = softmax(logits, 1);

  std::vector<int> head_of(Kl);
  for (int k = 0; k < Kl; ++k) head_of[k] = k / (p.refs * p.points);
  Tensor base = expand_refs(refs, Nq, p);

  Tensor out;
  for (int l = 0; l < p.levels; ++l) {
    Tensor val = values_preprojected
                     ? values[l]
                     : project_value_map(values[l], p.w_val, p.b_val);
    Tensor pts = add(slice_cols(off, l * Kl * 2, (l + 1) * Kl * 2), base);
    Tensor samp = bilinear_sample(val, reshape(pts, {Nq * Kl, 2}));
    Tensor wl = slice_cols(w, l * Kl, (l + 1) * Kl);
    Tensor contrib = weighted_head_sum(samp, wl, head_of, p.heads);
    out = l == 0 ? contrib : add(out, contrib);
  }
  if (apply_out_proj) out = linear(out, p.w_out, p.b_out);
  return out;
}

Tensor plane_to_featmap(const Tensor& q, int W, int L) {
  if (q.ndim() != 2 || q.dim(0) != W * L)
    throw std::invalid_argument("plane_to_featmap: expected [W*L, D]");
  return reshape(transpose(q), {q.dim(1), W, L});
}

LayerParams LayerParams::create(ParamStore& params, const std::string& prefix,
                                int D, int heads, int points, int levels,
                                int n_r3d, int ffn_hidden, Rng& rng) {
  LayerParams lp;
  lp.ln_pca_g = params.add(prefix + ".ln_pca.g", Tensor::full({D}, 1.0));
  lp.ln_pca_b = params.add(prefix + ".ln_pca.b", Tensor::zeros({D}));
  lp.ln_ssca_g = params.add(prefix + ".ln_ssca.g", Tensor::full({D}, 1.0));
  lp.ln_ssca_b = params.add(prefix + ".ln_ssca.b", Tensor::zeros({D}));
  lp.ln_ffn_g = params.add(prefix + ".ln_ffn.g", Tensor::full({D}, 1.0));
  lp.ln_ffn_b = params.add(prefix + ".ln_ffn.b", Tensor::zeros({D}));
  lp.pca = DeformAttnParams::create(params, prefix + ".pca", D, heads, points,
                                    1, 1, rng);
  lp.ssca = DeformAttnParams::create(params, prefix + ".ssca", D, heads,
                                     points, levels, n_r3d, rng);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(D));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(ffn_hidden));
  lp.ffn_w1 =
      params.add(prefix + ".ffn.w1", Tensor::uniform({ffn_hidden, D}, b1, rng));
  lp.ffn_b1 = params.add(prefix + ".ffn.b1", Tensor::uniform({ffn_hidden}, b1, rng));
  lp.ffn_w2 =
      params.add(prefix + ".ffn.w2", Tensor::uniform({D, ffn_hidden}, b2, rng));
  lp.ffn_b2 = params.add(prefix + ".ffn.b2", Tensor::uniform({D}, b2, rng));
  return lp;
}

void pca_level(Tensor& floor_q, Tensor& ceil_q, const Tensor& planar_refs,
               const LayerParams& lp, int W, int L) {
  // Stage 1: floor queries read the ceiling plane.
  {
    Tensor qn = layer_norm(floor_q, lp.ln_pca_g, lp.ln_pca_b);
    std::vector<Tensor> vals = {plane_to_featmap(ceil_q, W, L)};
    Tensor upd = deformable_attention(qn, planar_refs, vals, lp.pca);
    floor_q = add(floor_q, upd);
  }
  // Stage 2: ceiling queries read the already-updated floor plane.
  {
    Tensor qn = layer_norm(ceil_q, lp.ln_pca_g, lp.ln_pca_b);
    std::vector<Tensor> vals = {plane_to_featmap(floor_q, W, L)};
    Tensor upd = deformable_attention(qn, planar_refs, vals, lp.pca);
    ceil_q = add(ceil_q, upd);
  }
}

void ssca_plane(Tensor& q, const std::vector<ViewRefs>& per_view,
                const std::vector<std::vector<Tensor>>& view_values,
                const LayerParams& lp) {
  if (per_view.size() != view_values.size())
    throw std::invalid_argument("ssca_plane: view count mismatch");
  const int Nq = q.dim(0);
  Tensor qn = layer_norm(q, lp.ln_ssca_g, lp.ln_ssca_b);

  // Per token: average pre-projection attention outputs over the views whose
  // pillar hits the image, then project once (linearity makes this equal to
  // averaging projected outputs).
  std::vector<double> hits(static_cast<size_t>(Nq), 0.0);
  Tensor acc;
  bool any = false;
  for (size_t v = 0; v < per_view.size(); ++v) {
    if (!per_view[v].any_hit) continue;
    Tensor o = deformable_attention(qn, per_view[v].refs, view_values[v],
                                    lp.ssca, &per_view[v].ref_mask,
                                    /*values_preprojected=*/true,
                                    /*apply_out_proj=*/false);
    o = scale_rows(o, Tensor::from_data({Nq}, std::vector<double>(
                                                  per_view[v].token_hit)));
    acc = any ? add(acc, o) : o;
    any = true;
    for (int n = 0; n < Nq; ++n) hits[n] += per_view[v].token_hit[n];
  }
  if (!any) return;  // no view sees this plane: identity

  std::vector<double> inv(static_cast<size_t>(Nq));
  std::vector<double> seen(static_cast<size_t>(Nq));
  for (int n = 0; n < Nq; ++n) {
    inv[n] = hits[n] > 0.0 ? 1.0 / hits[n] : 0.0;
    seen[n] = hits[n] > 0.0 ? 1.0 : 0.0;
  }
  acc = scale_rows(acc, Tensor::from_data({Nq}, std::move(inv)));
  Tensor upd = linear(acc, lp.ssca.w_out, lp.ssca.b_out);
  // Tokens with an empty hit set must pass through untouched, including the
  // output bias.
  upd = scale_rows(upd, Tensor::from_data({Nq}, std::move(seen)));
  q = add(q, upd);
}

void ffn_plane(Tensor& q, const LayerParams& lp) {
  Tensor qn = layer_norm(q, lp.ln_ffn_g, lp.ln_ffn_b);
  Tensor h = relu(linear(qn, lp.ffn_w1, lp.ffn_b1));
  q = add(q, linear(h, lp.ffn_w2, lp.ffn_b2));
}

}  // namespace vslice
