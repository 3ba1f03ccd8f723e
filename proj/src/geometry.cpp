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

#include "vslice/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vslice {

Mat3 Mat3::identity() {
  Mat3 r;
  r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  return r;
}

Vec3 Mat3::apply(const Vec3& v) const {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
          m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Mat3 Mat3::mul(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += (*this)(i, k) * o(k, j);
      r(i, j) = acc;
    }
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

void CameraParams::validate() const {
  // R R^T = I and det R = +1.
  const Mat3 rrt = R.mul(R.transposed());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want = i == j ? 1.0 : 0.0;
      if (std::fabs(rrt(i, j) - want) > 1e-9)
        throw std::invalid_argument("CameraParams: R is not orthonormal");
    }
  const double det =
      R(0, 0) * (R(1, 1) * R(2, 2) - R(1, 2) * R(2, 1)) -
      R(0, 1) * (R(1, 0) * R(2, 2) - R(1, 2) * R(2, 0)) +
      R(0, 2) * (R(1, 0) * R(2, 1) - R(1, 1) * R(2, 0));
  if (std::fabs(det - 1.0) > 1e-9)
    throw std::invalid_argument("CameraParams: det(R) != +1");
  if (K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0)
    throw std::invalid_argument("CameraParams: K is not upper triangular");
  if (K(0, 0) <= 0.0 || K(1, 1) <= 0.0)
    throw std::invalid_argument("CameraParams: non-positive focal length");
  if (width < 2 || height < 2)
    throw std::invalid_argument("CameraParams: bad image size");
}

Vec3 CameraParams::camera_center() const {
  const Mat3 rt = R.transposed();
  const Vec3 c = rt.apply(T);
  return {-c[0], -c[1], -c[2]};
}

Vec3 CameraParams::backproject(double u, double v, double depth) const {
  // Invert the upper triangular K directly.
  const double fx = K(0, 0), fy = K(1, 1);
  const double cx = K(0, 2), cy = K(1, 2), sk = K(0, 1);
  const double yc = (v - cy) / fy;
  const double xc = (u - cx - sk * yc) / fx;
  const Vec3 cam = {xc * depth, yc * depth, depth};
  const Mat3 rt = R.transposed();
  const Vec3 d = rt.apply({cam[0] - T[0], cam[1] - T[1], cam[2] - T[2]});
  return d;
}

void SceneConfig::validate() const {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("SceneConfig: " + what);
  };
  if (!(x_max > x_min && y_max > y_min && z_max > z_min))
    bad("degenerate scene bounds");
  if (W < 1 || L < 1 || S < 1 || N_r3d < 1 || layers < 1)
    bad("W, L, S, N_r3d and layers must be >= 1");
  if (H_v < 1 || H_v % S != 0) bad("H_v must be a positive multiple of S");
  if (C < 2) bad("need at least the empty class plus one category");
  if (num_views < 1) bad("need at least one view");
  if (pillar_span_scale <= 0.0) bad("pillar_span_scale must be positive");
}

Vec2 token_world_xy(const SceneConfig& cfg, int ix, int iy) {
  // Cell centers: the printed index-to-metric map is shifted by +0.5 cell so
  // reference pillars line up with the anchor convention.
  const double px = cfg.x_extent() / cfg.W;
  const double py = cfg.y_extent() / cfg.L;
  return {cfg.x_min + (ix + 0.5) * px, cfg.y_min + (iy + 0.5) * py};
}

std::vector<Vec2> make_planar_refs(const SceneConfig& cfg) {
  cfg.validate();
  std::vector<Vec2> refs;
  refs.reserve(static_cast<size_t>(cfg.tokens()));
  for (int ix = 0; ix < cfg.W; ++ix)
    for (int iy = 0; iy < cfg.L; ++iy)
      refs.push_back({(ix + 0.5) / cfg.W, (iy + 0.5) / cfg.L});
  return refs;
}

std::vector<Vec3> make_pillar_refs(const SceneConfig& cfg, int slice_i,
                                   PlaneRole role) {
  cfg.validate();
  if (slice_i < 1 || slice_i > cfg.S)
    throw std::out_of_range("make_pillar_refs: slice index out of range");
  const double H = cfg.scene_height();
  const double beta = role == PlaneRole::kFloor ? 0.0 : 0.5;
  const double base = (slice_i - 1 + beta) * (H / cfg.S);
  const double step =
      cfg.pillar_span_scale * H / (2.0 * cfg.S * cfg.N_r3d);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<size_t>(cfg.tokens()) * cfg.N_r3d);
  for (int ix = 0; ix < cfg.W; ++ix)
    for (int iy = 0; iy < cfg.L; ++iy) {
      const Vec2 xy = token_world_xy(cfg, ix, iy);
      for (int n = 1; n <= cfg.N_r3d; ++n)
        pts.push_back({xy[0], xy[1], cfg.z_min + base + n * step});
    }
  return pts;
}

std::vector<Vec3> make_anchor_grid(const SceneConfig& cfg, int slice_i) {
  cfg.validate();
  if (slice_i < 1 || slice_i > cfg.S)
    throw std::out_of_range("make_anchor_grid: slice index out of range");
  const double z = cfg.z_min + (slice_i - 0.5) * cfg.slab_height();
  std::vector<Vec3> pts;
  pts.reserve(static_cast<size_t>(cfg.tokens()));
  for (int ix = 0; ix < cfg.W; ++ix)
    for (int iy = 0; iy < cfg.L; ++iy) {
      const Vec2 xy = token_world_xy(cfg, ix, iy);
      pts.push_back({xy[0], xy[1], z});
    }
  return pts;
}

Projection project(const std::vector<Vec3>& points, const CameraParams& cam) {
  Projection out;
  const size_t n = points.size();
  out.pixels.resize(n);
  out.depth.resize(n);
  out.hit.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec3& p = points[i];
    const Vec3 c = cam.R.apply(p);
    const Vec3 camp = {c[0] + cam.T[0], c[1] + cam.T[1], c[2] + cam.T[2]};
    const double z = camp[2];
    out.depth[i] = z;
    if (std::fabs(z) < 1e-9) {
      out.pixels[i] = {0.0, 0.0};
      out.hit[i] = 0;
      continue;
    }
    const Vec3 h = cam.K.apply(camp);
    const double u = h[0] / z;
    const double v = h[1] / z;
    out.pixels[i] = {u, v};
    out.hit[i] = z > 0.0 && u >= 0.0 && u <= cam.width - 1 && v >= 0.0 &&
                         v <= cam.height - 1
                     ? 1
                     : 0;
  }
  return out;
}

}  // namespace vslice
