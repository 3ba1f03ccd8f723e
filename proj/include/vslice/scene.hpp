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
#include <utility>
#include <vector>

#include "vslice/geometry.hpp"
#include "vslice/occupancy.hpp"
#include "vslice/tensor.hpp"

namespace vslice {

struct Box {
  int cls = 0;       // class index, >= 1
  Vec3 mn{}, mx{};   // axis-aligned corners, meters

  bool contains(const Vec3& p) const {
    return p[0] >= mn[0] && p[0] <= mx[0] && p[1] >= mn[1] &&
           p[1] <= mx[1] && p[2] >= mn[2] && p[2] <= mx[2];
  }
};

/// Procedural room: axis-aligned boxes with exact ground truth, plus an
/// inward-facing camera ring.
struct SyntheticScene {
  SceneConfig cfg;
  std::vector<Box> boxes;
  std::vector<CameraParams> cameras;
  std::vector<std::string> class_names;  // [0] = "empty"
};

enum class RendererMode { kSemanticOnehot, kDepth, kLearnedToy };

RendererMode renderer_mode_from_string(const std::string& s);
std::string renderer_mode_to_string(RendererMode m);

/// Stand-in for a pretrained image encoder. semantic-onehot renders one-hot
/// class channels of the nearest surface per pixel; depth renders normalized
/// inverse depth; learned-toy renders both stacked so the model's trainable
/// input projection acts as a toy encoder.
struct FeatureRenderer {
  RendererMode mode = RendererMode::kSemanticOnehot;
  int scales = 1;

  int channels(int num_classes) const;
};

/// Boxes are placed collision-aware; `stacking` > 0 forces one vertical
/// tower of `stacking` boxes with identical footprints and distinct classes.
/// The camera ring is regenerated until every camera sees at least one box.
SyntheticScene generate_scene(const SceneConfig& cfg, uint64_t seed,
                              int num_objects, int stacking, int image_w,
                              int image_h);

/// GT occupancy: voxel labeled by the last-placed box covering its center.
VoxelGrid scene_gt(const SyntheticScene& scene);

/// Nearest box along origin + t*dir (t > eps). Returns (class, t) or (0, inf)
/// for a miss. dir need not be normalized; t is in dir units.
std::pair<int, double> cast_ray(const std::vector<Box>& boxes,
                                const Vec3& origin, const Vec3& dir);

/// Per view, per scale: constant channel maps [C_feat, H, W]. Scale l is the
/// full-resolution render average-pooled by 2^l.
std::vector<std::vector<Tensor>> render_views(
    const SyntheticScene& scene, const std::vector<CameraParams>& cams,
    const FeatureRenderer& renderer);

std::string scene_to_json(const SyntheticScene& scene);
SyntheticScene scene_from_json(const std::string& text);

}  // namespace vslice
