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

#include <array>
#include <cstdint>
#include <vector>

namespace vslice {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

struct Mat3 {
  // Row-major.
  std::array<double, 9> m{};

  static Mat3 identity();
  double& operator()(int r, int c) { return m[r * 3 + c]; }
  double operator()(int r, int c) const { return m[r * 3 + c]; }
  Vec3 apply(const Vec3& v) const;
  Mat3 mul(const Mat3& o) const;
  Mat3 transposed() const;
};

/// Pinhole camera: pixel = perspective division of K * (R * p + T).
struct CameraParams {
  Mat3 K;       // intrinsics, upper triangular, pixels
  Mat3 R;       // world-to-camera rotation
  Vec3 T{};     // world-to-camera translation, meters
  int width = 0, height = 0;

  /// Throws unless R is orthonormal with det +1 (1e-9) and K is upper
  /// triangular with positive focal entries.
  void validate() const;

  Vec3 camera_center() const;  // -R^T * T
  /// World point on the ray through pixel (u,v) at camera-frame depth d.
  Vec3 backproject(double u, double v, double depth) const;
};

struct SceneConfig {
  double x_min = -3.2, x_max = 3.2;
  double y_min = -3.2, y_max = 3.2;
  double z_min = -1.28, z_max = 1.28;
  // Slice plane resolution: W cells along x, L cells along y.
  int W = 40, L = 40;
  int S = 16;        // slice pair count
  int N_r3d = 4;     // pillar points per query per half-slab
  int H_v = 16;      // vertical voxel count; must be divisible by S
  int C = 82;        // class count including "empty" (index 0)
  int layers = 3;
  int num_views = 20;
  // Multiplier on the Eq-style pillar span (1 = half a slab per role).
  double pillar_span_scale = 1.0;

  void validate() const;

  double x_extent() const { return x_max - x_min; }
  double y_extent() const { return y_max - y_min; }
  double scene_height() const { return z_max - z_min; }
  double slab_height() const { return scene_height() / S; }
  int tokens() const { return W * L; }
};

enum class PlaneRole { kFloor, kCeiling };

/// Planar reference grid: W*L cell centers in normalized [0,1]^2 slice
/// coordinates, ordered x-major (token t = ix*L + iy). Shared by the floor
/// and ceiling queries of every level.
std::vector<Vec2> make_planar_refs(const SceneConfig& cfg);

/// World-space pillar reference points for one slice level and role:
/// W*L * N_r3d points. Horizontal coordinates are the token cell centers;
/// vertical coordinates climb n * H/(2*S*N_r3d) above the half-slab base
/// (floor role: slab bottom; ceiling role: slab middle), n = 1..N_r3d.
/// slice_i is 1-based.
std::vector<Vec3> make_pillar_refs(const SceneConfig& cfg, int slice_i,
                                   PlaneRole role);

/// One 3D anchor per token: cell center in x,y at the slice's mid-height.
std::vector<Vec3> make_anchor_grid(const SceneConfig& cfg, int slice_i);

struct Projection {
  std::vector<Vec2> pixels;    // (u,v), pixel units
  std::vector<double> depth;   // camera-frame z
  std::vector<uint8_t> hit;    // depth > 0 and 0 <= u <= w-1, 0 <= v <= h-1
};

Projection project(const std::vector<Vec3>& points, const CameraParams& cam);

/// Cell-center world coordinates of token (ix, iy).
Vec2 token_world_xy(const SceneConfig& cfg, int ix, int iy);

}  // namespace vslice
