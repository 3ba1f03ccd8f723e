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
#include "vslice/tensor.hpp"

namespace vslice {

/// Class-index lattice over the scene, flat order (x*L + y)*H_v + z.
struct VoxelGrid {
  int W = 0, L = 0, Hv = 0;
  int C = 0;
  std::vector<int> labels;
  std::vector<std::string> class_names;  // index 0 = "empty"

  static VoxelGrid empty_grid(int W, int L, int Hv, int C);
  int64_t numel() const { return static_cast<int64_t>(W) * L * Hv; }
  int& at(int x, int y, int z) {
    return labels[(static_cast<size_t>(x) * L + y) * Hv + z];
  }
  int at(int x, int y, int z) const {
    return labels[(static_cast<size_t>(x) * L + y) * Hv + z];
  }
  void validate() const;
};

/// Two 3x3x3 convolution stages: D -> D with ReLU, then D -> C.
struct FcnHead {
  Tensor w1, b1;  // [D,D,3,3,3], [D]
  Tensor w2, b2;  // [C,D,3,3,3], [C]
  static FcnHead create(ParamStore& params, const std::string& prefix, int D,
                        int C, Rng& rng);
};

/// Blends each level's floor and ceiling planes into voxel features
/// [D, W, L, H_v]. The floor plane carries the slab's bottom face and the
/// ceiling plane its top face; a voxel is blended by its center's fractional
/// height within its slab. Plane resolution must equal the voxel x,y
/// resolution, so the horizontal interpolation lands on the token lattice.
Tensor assemble_voxels(const std::vector<Tensor>& floors,
                       const std::vector<Tensor>& ceils,
                       const SceneConfig& cfg);

/// voxfeat [D,W,L,H_v] -> logits [C,W,L,H_v].
Tensor decode_logits(const Tensor& voxfeat, const FcnHead& head);

/// logits [C,W,L,H_v] -> per-voxel class probabilities [C, W*L*H_v].
Tensor decode_probs(const Tensor& logits);

/// Argmax over classes -> label grid.
VoxelGrid probs_to_grid(const Tensor& probs, const SceneConfig& cfg,
                        const std::vector<std::string>& class_names);

struct IoUResult {
  std::vector<double> iou;      // NaN-free; absent classes hold 0
  std::vector<bool> present;    // class had any GT or predicted voxel
  double miou = 0.0;            // mean over present classes
};

/// Per-class IoU = TP/(TP+FP+FN); classes absent from both grids are
/// excluded from the mean.
IoUResult miou(const VoxelGrid& pred, const VoxelGrid& gt, int C);

double voxel_accuracy(const VoxelGrid& pred, const VoxelGrid& gt);

}  // namespace vslice
