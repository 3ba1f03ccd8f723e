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

#include "vslice/model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace vslice {

namespace {

bool same_rig(const std::vector<CameraParams>& a,
              const std::vector<CameraParams>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].width != b[i].width || a[i].height != b[i].height) return false;
    if (std::memcmp(a[i].K.m.data(), b[i].K.m.data(), sizeof(a[i].K.m)) != 0 ||
        std::memcmp(a[i].R.m.data(), b[i].R.m.data(), sizeof(a[i].R.m)) != 0 ||
        std::memcmp(a[i].T.data(), b[i].T.data(), sizeof(a[i].T)) != 0)
      return false;
  }
  return true;
}

// Normalized image coordinates (row, col) in [0,1]; shared by all pyramid
// levels since sampling is align-corners.
inline Vec2 normalize_pixel(const Vec2& uv, const CameraParams& cam) {
  const double du = cam.width > 1 ? cam.width - 1.0 : 1.0;
  const double dv = cam.height > 1 ? cam.height - 1.0 : 1.0;
  return {uv[1] / dv, uv[0] / du};
}

}  // namespace

SliceOccupancyModel::SliceOccupancyModel(const ModelConfig& cfg, int feat_channels,
                             uint64_t seed)
    : cfg_(cfg), feat_channels_(feat_channels) {
  cfg_.scene.validate();
  if (feat_channels <= 0)
    throw std::invalid_argument("SliceOccupancyModel: feat_channels must be > 0");
  Rng rng(seed);
  const int D = cfg_.D;
  const double bin = 1.0 / std::sqrt(static_cast<double>(feat_channels));
  const double bd = 1.0 / std::sqrt(static_cast<double>(D));
  enc_w_ = params_.add("enc.w", Tensor::uniform({D, feat_channels}, bin, rng));
  enc_b_ = params_.add("enc.b", Tensor::uniform({D}, bin, rng));
  if (cfg_.renderer == RendererMode::kLearnedToy) {
    enc2_w_ = params_.add("enc2.w", Tensor::uniform({D, D}, bd, rng));
    enc2_b_ = params_.add("enc2.b", Tensor::uniform({D}, bd, rng));
  }
  for (int i = 1; i <= cfg_.scene.S; ++i) {
    const std::string pre = "height." + std::to_string(i);
    height_emb_floor_.push_back(
        params_.add(pre + ".floor", Tensor::uniform({D}, bd, rng)));
    height_emb_ceil_.push_back(
        params_.add(pre + ".ceil", Tensor::uniform({D}, bd, rng)));
  }
  for (int l = 0; l < cfg_.scene.layers; ++l)
    layers_.push_back(LayerParams::create(
        params_, "layer." + std::to_string(l), D, cfg_.heads, cfg_.points,
        cfg_.feat_levels, cfg_.scene.N_r3d, cfg_.ffn_hidden, rng));
  head_ = FcnHead::create(params_, "head", D, cfg_.scene.C, rng);
}

Tensor SliceOccupancyModel::encode_view(const Tensor& raw) const {
  Tensor f = project_value_map(raw, enc_w_, enc_b_);
  if (cfg_.renderer == RendererMode::kLearnedToy)
    f = project_value_map(relu(f), enc2_w_, enc2_b_);
  return f;
}

void SliceOccupancyModel::build_geometry(const std::vector<CameraParams>& cams) {
  const SceneConfig& sc = cfg_.scene;
  const int Nq = sc.tokens();
  const int R = sc.N_r3d;
  const int V = static_cast<int>(cams.size());

  {
    const auto refs = make_planar_refs(sc);
    std::vector<double> d(static_cast<size_t>(Nq) * 2);
    for (int n = 0; n < Nq; ++n) {
      d[2 * n] = refs[n][0];
      d[2 * n + 1] = refs[n][1];
    }
    planar_refs_ = Tensor::from_data({Nq, 2}, std::move(d));
  }

  pillar_.assign(sc.S, {});
  anchor_.assign(sc.S, {});
  tokens_unseen_ = 0;
  for (int i = 1; i <= sc.S; ++i) {
    for (int role = 0; role < 2; ++role) {
      const auto pts = make_pillar_refs(
          sc, i, role == 0 ? PlaneRole::kFloor : PlaneRole::kCeiling);
      auto& views = pillar_[i - 1][role];
      views.resize(V);
      for (int v = 0; v < V; ++v) {
        const Projection pr = project(pts, cams[v]);
        ViewRefs& vr = views[v];
        std::vector<double> d(static_cast<size_t>(Nq) * R * 2);
        vr.ref_mask.assign(static_cast<size_t>(Nq) * R, 0);
        vr.token_hit.assign(Nq, 0.0);
        for (int n = 0; n < Nq; ++n)
          for (int r = 0; r < R; ++r) {
            const size_t k = static_cast<size_t>(n) * R + r;
            if (pr.hit[k]) {
              const Vec2 rc = normalize_pixel(pr.pixels[k], cams[v]);
              d[2 * k] = rc[0];
              d[2 * k + 1] = rc[1];
              vr.ref_mask[k] = 1;
              vr.token_hit[n] = 1.0;
              vr.any_hit = true;
            } else {
              d[2 * k] = 0.5;
              d[2 * k + 1] = 0.5;
            }
          }
        vr.refs = Tensor::from_data({Nq * R, 2}, std::move(d));
      }
    }

    const auto anchors = make_anchor_grid(sc, i);
    auto& aviews = anchor_[i - 1];
    aviews.resize(V);
    std::vector<uint8_t> seen(Nq, 0);
    for (int v = 0; v < V; ++v) {
      const Projection pr = project(anchors, cams[v]);
      AnchorView& av = aviews[v];
      std::vector<double> d(static_cast<size_t>(Nq) * 2);
      av.hit.assign(Nq, 0.0);
      for (int n = 0; n < Nq; ++n) {
        if (pr.hit[n]) {
          const Vec2 rc = normalize_pixel(pr.pixels[n], cams[v]);
          d[2 * n] = rc[0];
          d[2 * n + 1] = rc[1];
          av.hit[n] = 1.0;
          av.any_hit = true;
          seen[n] = 1;
        } else {
          d[2 * n] = 0.5;
          d[2 * n + 1] = 0.5;
        }
      }
      av.pts = Tensor::from_data({Nq, 2}, std::move(d));
    }
    for (int n = 0; n < Nq; ++n)
      if (!seen[n]) ++tokens_unseen_;
  }
  cached_cams_ = cams;
  geometry_ready_ = true;
}

ForwardResult SliceOccupancyModel::forward(
    const std::vector<std::vector<Tensor>>& images,
    const std::vector<CameraParams>& cams) {
  const SceneConfig& sc = cfg_.scene;
  const int V = static_cast<int>(cams.size());
  if (static_cast<int>(images.size()) != V || V == 0)
    throw std::invalid_argument("forward: need one image stack per camera");
  for (const auto& stack : images)
    if (static_cast<int>(stack.size()) != cfg_.feat_levels)
      throw std::invalid_argument("forward: wrong pyramid depth");
  if (!geometry_ready_ || !same_rig(cams, cached_cams_)) build_geometry(cams);

  std::vector<std::vector<Tensor>> feat(V);
  for (int v = 0; v < V; ++v)
    for (int l = 0; l < cfg_.feat_levels; ++l)
      feat[v].push_back(encode_view(images[v][l]));

  const int Nq = sc.tokens();
  // Content queries: hit-masked mean of finest-level features at the anchor
  // projections, plus a per-level, per-role height embedding.
  std::vector<Tensor> floors(sc.S), ceils(sc.S);
  for (int i = 0; i < sc.S; ++i) {
    Tensor acc;
    bool any = false;
    std::vector<double> hits(Nq, 0.0);
    for (int v = 0; v < V; ++v) {
      const AnchorView& av = anchor_[i][v];
      if (!av.any_hit) continue;
      Tensor s = bilinear_sample(feat[v][0], av.pts);
      s = scale_rows(s, Tensor::from_data({Nq}, std::vector<double>(av.hit)));
      acc = any ? add(acc, s) : s;
      any = true;
      for (int n = 0; n < Nq; ++n) hits[n] += av.hit[n];
    }
    if (!any) acc = Tensor::zeros({Nq, cfg_.D});
    std::vector<double> inv(Nq, 0.0);
    for (int n = 0; n < Nq; ++n)
      if (hits[n] > 0.0) inv[n] = 1.0 / hits[n];
    acc = scale_rows(acc, Tensor::from_data({Nq}, std::move(inv)));
    floors[i] = add_rowvec(acc, height_emb_floor_[i]);
    ceils[i] = add_rowvec(acc, height_emb_ceil_[i]);
  }

  for (const LayerParams& lp : layers_) {
    // One value projection per view/level, shared by all 2S planes.
    std::vector<std::vector<Tensor>> vproj(V);
    for (int v = 0; v < V; ++v)
      for (int l = 0; l < cfg_.feat_levels; ++l)
        vproj[v].push_back(
            project_value_map(feat[v][l], lp.ssca.w_val, lp.ssca.b_val));
    for (int i = 0; i < sc.S; ++i) {
      if (cfg_.pca_first) {
        pca_level(floors[i], ceils[i], planar_refs_, lp, sc.W, sc.L);
        ssca_plane(floors[i], pillar_[i][0], vproj, lp);
        ssca_plane(ceils[i], pillar_[i][1], vproj, lp);
      } else {
        ssca_plane(floors[i], pillar_[i][0], vproj, lp);
        ssca_plane(ceils[i], pillar_[i][1], vproj, lp);
        pca_level(floors[i], ceils[i], planar_refs_, lp, sc.W, sc.L);
      }
      ffn_plane(floors[i], lp);
      ffn_plane(ceils[i], lp);
    }
  }

  ForwardResult r;
  Tensor vox = assemble_voxels(floors, ceils, sc);
  r.logits = decode_logits(vox, head_);
  r.probs = decode_probs(r.logits);
  r.tokens_unseen = tokens_unseen_;
  return r;
}

}  // namespace vslice
