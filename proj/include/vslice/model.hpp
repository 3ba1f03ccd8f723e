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

#include "vslice/decoder.hpp"
#include "vslice/geometry.hpp"
#include "vslice/occupancy.hpp"
#include "vslice/scene.hpp"
#include "vslice/tensor.hpp"

namespace vslice {

struct ModelConfig {
  SceneConfig scene;
  int D = 64;
  int heads = 4;
  int points = 4;      // sampling points per (head, level, reference)
  int feat_levels = 1; // image feature pyramid levels
  int ffn_hidden = 128;
  bool pca_first = true;  // PCA -> SSCA -> FFN; false swaps the cross blocks
  RendererMode renderer = RendererMode::kSemanticOnehot;
};

struct ForwardResult {
  Tensor logits;  // [C, W, L, H_v]
  Tensor probs;   // [C, W*L*H_v]
  int tokens_unseen = 0;  // anchor tokens no camera could see (per level sum)
};

/// Vertical-slice occupancy model: per slice level a floor and a ceiling
/// query plane, refined by planar cross-attention between the pair, sliced
/// spatial cross-attention into the camera views, and an FFN; slice planes
/// are blended into a voxel volume and decoded by a two-stage 3D FCN.
class SliceOccupancyModel {
 public:
  SliceOccupancyModel(const ModelConfig& cfg, int feat_channels, uint64_t seed);

  ParamStore& params() { return params_; }
  const ModelConfig& config() const { return cfg_; }

  /// images: per view, per pyramid level, constant maps [C_feat, H, W].
  /// Geometry (reference points, hit masks) is cached per camera rig.
  ForwardResult forward(const std::vector<std::vector<Tensor>>& images,
                        const std::vector<CameraParams>& cams);

 private:
  void build_geometry(const std::vector<CameraParams>& cams);
  Tensor encode_view(const Tensor& raw) const;

  ModelConfig cfg_;
  int feat_channels_ = 0;
  ParamStore params_;

  Tensor enc_w_, enc_b_;    // input projection C_feat -> D
  Tensor enc2_w_, enc2_b_;  // extra D -> D stage (learned-toy renderer only)
  std::vector<Tensor> height_emb_floor_, height_emb_ceil_;  // per level, [D]
  std::vector<LayerParams> layers_;
  FcnHead head_;

  // Geometry cache, rebuilt when the camera rig changes.
  std::vector<CameraParams> cached_cams_;
  bool geometry_ready_ = false;
  Tensor planar_refs_;  // [Nq, 2]
  // pillar_[level-1][role][view]
  std::vector<std::array<std::vector<ViewRefs>, 2>> pillar_;
  // anchor_pts_[level-1][view]: [Nq,2] normalized anchor pixels; mask/hits.
  struct AnchorView {
    Tensor pts;
    std::vector<double> hit;
    bool any_hit = false;
  };
  std::vector<std::vector<AnchorView>> anchor_;
  int tokens_unseen_ = 0;
};

}  // namespace vslice
