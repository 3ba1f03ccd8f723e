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

#include "vslice/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "vslice/rng.hpp"

namespace vslice {

namespace {

Vec3 normalize(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

bool boxes_overlap(const Box& a, const Box& b) {
  for (int i = 0; i < 3; ++i)
    if (a.mx[i] <= b.mn[i] || b.mx[i] <= a.mn[i]) return false;
  return true;
}

CameraParams make_ring_camera(const SceneConfig& cfg, int index, int count,
                              int image_w, int image_h) {
  const double cx = 0.5 * (cfg.x_min + cfg.x_max);
  const double cy = 0.5 * (cfg.y_min + cfg.y_max);
  const double cz = 0.5 * (cfg.z_min + cfg.z_max);
  const double radius =
      0.42 * std::min(cfg.x_extent(), cfg.y_extent());
  const double az = 2.0 * M_PI * index / count;
  const Vec3 pos = {cx + radius * std::cos(az), cy + radius * std::sin(az),
                    cz + 0.25 * cfg.scene_height()};
  const Vec3 target = {cx, cy, cz};
  const Vec3 fwd = normalize(
      {target[0] - pos[0], target[1] - pos[1], target[2] - pos[2]});
  const Vec3 right = normalize(cross(fwd, {0.0, 0.0, 1.0}));
  const Vec3 down = cross(fwd, right);

  CameraParams cam;
  cam.width = image_w;
  cam.height = image_h;
  for (int j = 0; j < 3; ++j) {
    cam.R(0, j) = right[j];
    cam.R(1, j) = down[j];
    cam.R(2, j) = fwd[j];
  }
  const Vec3 rc = cam.R.apply(pos);
  cam.T = {-rc[0], -rc[1], -rc[2]};
  const double f = 0.55 * image_w;
  cam.K = Mat3::identity();
  cam.K(0, 0) = f;
  cam.K(1, 1) = f;
  cam.K(0, 2) = 0.5 * (image_w - 1);
  cam.K(1, 2) = 0.5 * (image_h - 1);
  cam.validate();
  return cam;
}

bool camera_sees_any_box(const CameraParams& cam,
                         const std::vector<Box>& boxes) {
  for (const auto& b : boxes) {
    const Vec3 c = {0.5 * (b.mn[0] + b.mx[0]), 0.5 * (b.mn[1] + b.mx[1]),
                    0.5 * (b.mn[2] + b.mx[2])};
    const Projection pr = project({c}, cam);
    if (pr.hit[0]) return true;
  }
  return false;
}

}  // namespace

RendererMode renderer_mode_from_string(const std::string& s) {
  if (s == "semantic-onehot") return RendererMode::kSemanticOnehot;
  if (s == "depth") return RendererMode::kDepth;
  if (s == "learned-toy-encoder") return RendererMode::kLearnedToy;
  throw std::invalid_argument("unknown renderer mode: " + s);
}

std::string renderer_mode_to_string(RendererMode m) {
  switch (m) {
    case RendererMode::kSemanticOnehot:
      return "semantic-onehot";
    case RendererMode::kDepth:
      return "depth";
    case RendererMode::kLearnedToy:
      return "learned-toy-encoder";
  }
  throw std::logic_error("bad renderer mode");
}

int FeatureRenderer::channels(int num_classes) const {
  switch (mode) {
    case RendererMode::kSemanticOnehot:
      return num_classes;
    case RendererMode::kDepth:
      return 1;
    case RendererMode::kLearnedToy:
      return num_classes + 1;
  }
  throw std::logic_error("bad renderer mode");
}

SyntheticScene generate_scene(const SceneConfig& cfg, uint64_t seed,
                              int num_objects, int stacking, int image_w,
                              int image_h) {
  cfg.validate();
  if (num_objects < 1)
    throw std::invalid_argument("generate_scene: num_objects must be >= 1");
  if (stacking < 0 || stacking > num_objects)
    throw std::invalid_argument("generate_scene: bad stacking count");

  const double margin = 0.05 * std::min(cfg.x_extent(), cfg.y_extent());
  const int max_attempts = 200;

  for (int attempt = 0; attempt < 8; ++attempt) {
    Rng rng = Rng(seed).fork(1000 + attempt);
    SyntheticScene scene;
    scene.cfg = cfg;
    scene.class_names.push_back("empty");
    for (int c = 1; c < cfg.C; ++c)
      scene.class_names.push_back("class" + std::to_string(c));

    auto rand_xy_extent = [&]() {
      return rng.uniform(0.2 * cfg.x_extent(), 0.45 * cfg.x_extent());
    };
    auto rand_height = [&]() {
      return rng.uniform(0.2 * cfg.scene_height(), 0.45 * cfg.scene_height());
    };
    auto next_class = [&](int i) { return 1 + i % (cfg.C - 1); };

    bool ok = true;
    int placed = 0;
    // One forced tower of `stacking` boxes with a shared footprint.
    if (stacking > 0) {
      const double sx = rand_xy_extent(), sy = rand_xy_extent();
      const double px = rng.uniform(cfg.x_min + margin, cfg.x_max - margin - sx);
      const double py = rng.uniform(cfg.y_min + margin, cfg.y_max - margin - sy);
      double z = cfg.z_min;
      for (int k = 0; k < stacking; ++k) {
        const double h =
            std::min(rand_height(), cfg.z_max - z - 1e-6 * (stacking - k));
        if (h <= 0.0) {
          ok = false;
          break;
        }
        Box b;
        b.cls = next_class(placed);
        b.mn = {px, py, z};
        b.mx = {px + sx, py + sy, z + h};
        scene.boxes.push_back(b);
        z += h;
        ++placed;
      }
    }
    // Remaining boxes on the floor, rejection sampled against overlaps.
    while (ok && placed < num_objects) {
      bool found = false;
      for (int tries = 0; tries < max_attempts; ++tries) {
        const double sx = rand_xy_extent(), sy = rand_xy_extent();
        const double h = rand_height();
        Box b;
        b.cls = next_class(placed);
        b.mn = {rng.uniform(cfg.x_min + margin, cfg.x_max - margin - sx),
                rng.uniform(cfg.y_min + margin, cfg.y_max - margin - sy),
                cfg.z_min};
        b.mx = {b.mn[0] + sx, b.mn[1] + sy, cfg.z_min + h};
        bool clash = false;
        for (const auto& other : scene.boxes)
          if (boxes_overlap(b, other)) {
            clash = true;
            break;
          }
        if (!clash) {
          scene.boxes.push_back(b);
          ++placed;
          found = true;
          break;
        }
      }
      if (!found) ok = false;
    }
    if (!ok) continue;

    scene.cameras.reserve(static_cast<size_t>(cfg.num_views));
    bool cams_ok = true;
    for (int v = 0; v < cfg.num_views; ++v) {
      CameraParams cam =
          make_ring_camera(cfg, v, cfg.num_views, image_w, image_h);
      if (!camera_sees_any_box(cam, scene.boxes)) {
        cams_ok = false;
        break;
      }
      scene.cameras.push_back(cam);
    }
    if (cams_ok) return scene;
  }
  throw std::runtime_error(
      "generate_scene: placement failed after bounded retries");
}

VoxelGrid scene_gt(const SyntheticScene& scene) {
  const SceneConfig& cfg = scene.cfg;
  VoxelGrid g = VoxelGrid::empty_grid(cfg.W, cfg.L, cfg.H_v, cfg.C);
  g.class_names = scene.class_names;
  const double dz = cfg.scene_height() / cfg.H_v;
  for (int x = 0; x < cfg.W; ++x)
    for (int y = 0; y < cfg.L; ++y) {
      const Vec2 xy = token_world_xy(cfg, x, y);
      for (int z = 0; z < cfg.H_v; ++z) {
        const Vec3 p = {xy[0], xy[1], cfg.z_min + (z + 0.5) * dz};
        int label = 0;
        for (const auto& b : scene.boxes)   // last-placed box wins
          if (b.contains(p)) label = b.cls;
        g.at(x, y, z) = label;
      }
    }
  return g;
}

std::pair<int, double> cast_ray(const std::vector<Box>& boxes,
                                const Vec3& origin, const Vec3& dir) {
  double best_t = std::numeric_limits<double>::infinity();
  int best_cls = 0;
  for (const auto& b : boxes) {
    // Slab intersection.
    double t0 = 1e-9, t1 = std::numeric_limits<double>::infinity();
    bool miss = false;
    for (int i = 0; i < 3; ++i) {
      if (std::fabs(dir[i]) < 1e-15) {
        if (origin[i] < b.mn[i] || origin[i] > b.mx[i]) {
          miss = true;
          break;
        }
        continue;
      }
      double ta = (b.mn[i] - origin[i]) / dir[i];
      double tb = (b.mx[i] - origin[i]) / dir[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) {
        miss = true;
        break;
      }
    }
    if (!miss && t0 < best_t) {
      best_t = t0;
      best_cls = b.cls;
    }
  }
  return {best_cls, best_t};
}

std::vector<std::vector<Tensor>> render_views(
    const SyntheticScene& scene, const std::vector<CameraParams>& cams,
    const FeatureRenderer& renderer) {
  const int C = renderer.channels(scene.cfg.C);
  std::vector<std::vector<Tensor>> out;
  out.reserve(cams.size());
  for (const auto& cam : cams) {
    const int w = cam.width, h = cam.height;
    Tensor img = Tensor::zeros({C, h, w});
    double* pix = img.data();
    const Vec3 origin = cam.camera_center();
    const int64_t plane = static_cast<int64_t>(h) * w;
#pragma omp parallel for schedule(static)
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const Vec3 at = cam.backproject(u, v, 1.0);
        const Vec3 dir = {at[0] - origin[0], at[1] - origin[1],
                          at[2] - origin[2]};
        // dir has unit camera-frame depth, so t is the camera depth.
        const auto [cls, t] = cast_ray(scene.boxes, origin, dir);
        const int64_t at_px = static_cast<int64_t>(v) * w + u;
        const bool hit = std::isfinite(t);
        const double invd = hit ? 1.0 / (1.0 + t) : 0.0;
        switch (renderer.mode) {
          case RendererMode::kSemanticOnehot:
            pix[(hit ? cls : 0) * plane + at_px] = 1.0;
            break;
          case RendererMode::kDepth:
            pix[at_px] = invd;
            break;
          case RendererMode::kLearnedToy:
            pix[(hit ? cls : 0) * plane + at_px] = 1.0;
            pix[scene.cfg.C * plane + at_px] = invd;
            break;
        }
      }
    }
    std::vector<Tensor> pyramid;
    pyramid.push_back(img);
    for (int s = 1; s < renderer.scales; ++s) {
      const Tensor& prev = pyramid.back();
      const int ph = prev.dim(1), pw = prev.dim(2);
      const int nh = std::max(1, ph / 2), nw = std::max(1, pw / 2);
      Tensor pooled = Tensor::zeros({C, nh, nw});
      for (int c = 0; c < C; ++c)
        for (int i = 0; i < nh; ++i)
          for (int j = 0; j < nw; ++j) {
            double acc = 0.0;
            int cnt = 0;
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                const int ii = 2 * i + a, jj = 2 * j + b;
                if (ii < ph && jj < pw) {
                  acc += prev.at({c, ii, jj});
                  ++cnt;
                }
              }
            pooled.data()[(static_cast<int64_t>(c) * nh + i) * nw + j] =
                acc / cnt;
          }
      pyramid.push_back(pooled);
    }
    out.push_back(std::move(pyramid));
  }
  return out;
}

std::string scene_to_json(const SyntheticScene& scene) {
  nlohmann::json j;
  const SceneConfig& c = scene.cfg;
  j["bounds"] = {{"x", {c.x_min, c.x_max}},
                 {"y", {c.y_min, c.y_max}},
                 {"z", {c.z_min, c.z_max}}};
  j["grid"] = {{"W", c.W}, {"L", c.L}, {"H_v", c.H_v}, {"S", c.S},
               {"C", c.C}};
  j["class_names"] = scene.class_names;
  j["boxes"] = nlohmann::json::array();
  for (const auto& b : scene.boxes)
    j["boxes"].push_back({{"class", b.cls},
                          {"min", {b.mn[0], b.mn[1], b.mn[2]}},
                          {"max", {b.mx[0], b.mx[1], b.mx[2]}}});
  j["cameras"] = nlohmann::json::array();
  for (const auto& cam : scene.cameras) {
    nlohmann::json cj;
    cj["K"] = cam.K.m;
    cj["R"] = cam.R.m;
    cj["T"] = cam.T;
    cj["width"] = cam.width;
    cj["height"] = cam.height;
    j["cameras"].push_back(cj);
  }
  return j.dump(2);
}

SyntheticScene scene_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SyntheticScene scene;
  SceneConfig& c = scene.cfg;
  c.x_min = j.at("bounds").at("x")[0];
  c.x_max = j.at("bounds").at("x")[1];
  c.y_min = j.at("bounds").at("y")[0];
  c.y_max = j.at("bounds").at("y")[1];
  c.z_min = j.at("bounds").at("z")[0];
  c.z_max = j.at("bounds").at("z")[1];
  c.W = j.at("grid").at("W");
  c.L = j.at("grid").at("L");
  c.H_v = j.at("grid").at("H_v");
  c.S = j.at("grid").at("S");
  c.C = j.at("grid").at("C");
  scene.class_names = j.at("class_names").get<std::vector<std::string>>();
  for (const auto& bj : j.at("boxes")) {
    Box b;
    b.cls = bj.at("class");
    for (int i = 0; i < 3; ++i) {
      b.mn[i] = bj.at("min")[i];
      b.mx[i] = bj.at("max")[i];
    }
    scene.boxes.push_back(b);
  }
  for (const auto& cj : j.at("cameras")) {
    CameraParams cam;
    for (int i = 0; i < 9; ++i) {
      cam.K.m[i] = cj.at("K")[i];
      cam.R.m[i] = cj.at("R")[i];
    }
    for (int i = 0; i < 3; ++i) cam.T[i] = cj.at("T")[i];
    cam.width = cj.at("width");
    cam.height = cj.at("height");
    cam.validate();
    scene.cameras.push_back(cam);
  }
  c.num_views = static_cast<int>(scene.cameras.size());
  return scene;
}

}  // namespace vslice
