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

#include "vslice/geometry.hpp"
#include "vslice/occupancy.hpp"
#include "vslice/tensor.hpp"

namespace vslice {

/// Occupancy grid container format, 18-byte header:
///   bytes 0-3   magic "SOCC"
///   bytes 4-5   version, u16 little-endian, = 1
///   bytes 6-17  W, L, H_v as u32 little-endian
/// followed by W*L*H_v class indices as u8, x-major / y-middle / z-minor.
/// Class count and names travel in the JSON sidecar written next to the
/// binary (path + ".json") together with the metric bounds and, when
/// provided, the run configuration text.
void export_grid(const VoxelGrid& grid, const std::string& path,
                 const SceneConfig& scene, const std::string& config_text = "");

/// Reads path and, when present, the sidecar for C and class names (without
/// it C falls back to max label + 1). Structured errors name the missing or
/// malformed section.
VoxelGrid import_grid(const std::string& path);

/// Checkpoint: every parameter as a named 64-bit float array with its shape,
/// plus the run configuration text.
void save_checkpoint(const std::string& path, const ParamStore& params,
                     const std::string& config_text);

/// Returns the stored configuration text (to rebuild the model first).
std::string checkpoint_config(const std::string& path);

/// Fills an existing ParamStore; names and shapes must match exactly.
void load_checkpoint(const std::string& path, ParamStore& params);

}  // namespace vslice
