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

#include <memory>
#include <string>
#include <vector>

#include "vslice/config.hpp"
#include "vslice/losses.hpp"
#include "vslice/model.hpp"
#include "vslice/scene.hpp"

namespace vslice {

/// One overfit target: a generated scene, its rendered views and exact
/// ground truth, and a freshly initialized model.
struct OverfitSetup {
  SyntheticScene scene;
  VoxelGrid gt;
  FeatureRenderer renderer;
  std::vector<std::vector<Tensor>> images;
  std::unique_ptr<SliceOccupancyModel> model;
};

OverfitSetup make_overfit_setup(const RunConfig& cfg);

struct TrainResult {
  int steps_run = 0;
  double acc = 0.0;
  double miou = 0.0;
  LossReport last;
  VoxelGrid pred, gt;
  std::string csv;  // step,l_ce,l_geo,l_sem,l_total,mIoU
  std::unique_ptr<SliceOccupancyModel> model;
  SyntheticScene scene;
};

/// Trains on one synthetic scene with AdamW. Metrics are evaluated every
/// `eval_every` steps (and on the last step); training stops early once both
/// enabled early-stop thresholds are met. steps=0 evaluates the initial
/// model only.
TrainResult train_overfit(const RunConfig& cfg);

}  // namespace vslice
