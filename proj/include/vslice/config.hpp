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
#include <string>

#include "vslice/model.hpp"

namespace vslice {

/// Flat run configuration. The text form is `key = value` lines with `#`
/// comments; keys match the field names below and unknown keys are errors.
struct RunConfig {
  SceneConfig scene;
  uint64_t seed = 1;
  int D = 64;
  int heads = 4;
  int points = 4;
  int feat_levels = 1;
  int ffn_hidden = 128;
  std::string renderer = "semantic-onehot";
  bool pca_first = true;

  int steps = 500;
  double lr = 1e-4;
  double weight_decay = 1e-2;
  int eval_every = 25;
  double early_stop_acc = -1.0;   // < 0 disables
  double early_stop_miou = -1.0;  // both must be met when enabled

  int num_objects = 4;
  int stacking = 2;
  int image_w = 48;
  int image_h = 36;

  std::string out_dir = "out";

  void validate() const;
  ModelConfig model_config() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_text(const RunConfig& cfg);

}  // namespace vslice
