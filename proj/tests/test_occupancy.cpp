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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "vslice/occupancy.hpp"
#include "vslice/ops.hpp"
#include "vslice/rng.hpp"

using namespace vslice;

TEST_CASE("assemble_voxels blend factors") {
  // S=1, H_v=4: factors {0.125, 0.375, 0.625, 0.875}.
  SceneConfig cfg;
  cfg.W = 2;
  cfg.L = 2;
  cfg.S = 1;
  cfg.H_v = 4;
  Tensor f = Tensor::zeros({4, 1});
  Tensor c = Tensor::full({4, 1}, 1.0);
  Tensor v = assemble_voxels({f}, {c}, cfg);
  const double expect[4] = {0.125, 0.375, 0.625, 0.875};
  for (int z = 0; z < 4; ++z)
    CHECK(v.data()[z] == doctest::Approx(expect[z]).epsilon(1e-12));

  // H_v = S: blend 0.5 at every voxel center.
  SceneConfig cfg2;
  cfg2.W = 1;
  cfg2.L = 1;
  cfg2.S = 2;
  cfg2.H_v = 2;
  cfg2.N_r3d = 1;
  Tensor v2 = assemble_voxels(
      {Tensor::zeros({1, 1}), Tensor::zeros({1, 1})},
      {Tensor::full({1, 1}, 1.0), Tensor::full({1, 1}, 1.0)}, cfg2);
  CHECK(v2.data()[0] == doctest::Approx(0.5));
  CHECK(v2.data()[1] == doctest::Approx(0.5));
}

TEST_CASE("assemble_voxels reconstructs bilinear-by-piecewise-linear fields") {
  SceneConfig cfg;
  cfg.W = 5;
  cfg.L = 4;
  cfg.S = 3;
  cfg.H_v = 12;
  cfg.N_r3d = 1;
  const int D = 2;
  Rng rng(41);

  // Random per-channel coefficients (a + b*x + c*y + d*x*y) at each of the
  // S+1 slab boundaries; the field is linear in z between boundaries.
  std::vector<std::array<double, 4>> coef(
      static_cast<size_t>(D) * (cfg.S + 1));
  for (auto& c4 : coef)
    for (double& x : c4) x = rng.uniform(-2.0, 2.0);
  auto field = [&](int d, double x, double y, int boundary) {
    const auto& c4 = coef[static_cast<size_t>(d) * (cfg.S + 1) + boundary];
    return c4[0] + c4[1] * x + c4[2] * y + c4[3] * x * y;
  };

  std::vector<Tensor> floors, ceils;
  for (int s = 0; s < cfg.S; ++s) {
    std::vector<double> fd, cd;
    for (int ix = 0; ix < cfg.W; ++ix)
      for (int iy = 0; iy < cfg.L; ++iy)
        for (int d = 0; d < D; ++d) {
          fd.push_back(field(d, ix, iy, s));
          cd.push_back(field(d, ix, iy, s + 1));
        }
    floors.push_back(Tensor::from_data({cfg.tokens(), D}, std::move(fd)));
    ceils.push_back(Tensor::from_data({cfg.tokens(), D}, std::move(cd)));
  }
  Tensor v = assemble_voxels(floors, ceils, cfg);
  const int m = cfg.H_v / cfg.S;
  for (int d = 0; d < D; ++d)
    for (int ix = 0; ix < cfg.W; ++ix)
      for (int iy = 0; iy < cfg.L; ++iy)
        for (int z = 0; z < cfg.H_v; ++z) {
          const int s = z / m;
          const double t = (z % m + 0.5) / m;
          const double expect = (1 - t) * field(d, ix, iy, s) +
                                t * field(d, ix, iy, s + 1);
          const double got =
              v.data()[((static_cast<size_t>(d) * cfg.W + ix) * cfg.L + iy) *
                           cfg.H_v +
                       z];
          CHECK(std::fabs(got - expect) < 1e-9);
        }
}

TEST_CASE("assemble_voxels validates shapes") {
  SceneConfig cfg;
  cfg.W = 2;
  cfg.L = 2;
  cfg.S = 2;
  cfg.H_v = 4;
  CHECK_THROWS(assemble_voxels({Tensor::zeros({4, 1})},
                               {Tensor::zeros({4, 1})}, cfg));
  SceneConfig bad = cfg;
  bad.H_v = 3;  // not divisible by S
  CHECK_THROWS(assemble_voxels(
      {Tensor::zeros({4, 1}), Tensor::zeros({4, 1})},
      {Tensor::zeros({4, 1}), Tensor::zeros({4, 1})}, bad));
}

TEST_CASE("decode identities") {
  SceneConfig cfg;
  cfg.W = 3;
  cfg.L = 3;
  cfg.S = 1;
  cfg.H_v = 2;
  const int D = 4, C = 5;
  Rng rng(42);
  ParamStore ps;
  FcnHead head = FcnHead::create(ps, "h", D, C, rng);
  Tensor vox = Tensor::uniform({D, cfg.W, cfg.L, cfg.H_v}, 1.0, rng);

  // Zero weights and biases -> uniform probabilities.
  for (auto& [name, t] : ps.items)
    for (double& v : t.vec()) v = 0.0;
  Tensor probs = decode_probs(decode_logits(vox, head));
  REQUIRE(probs.dim(0) == C);
  for (int64_t i = 0; i < probs.numel(); ++i)
    CHECK(probs.data()[i] == doctest::Approx(1.0 / C).epsilon(1e-12));

  // One-hot final bias -> argmax everywhere that class.
  head.b2.data()[3] = 5.0;
  Tensor probs2 = decode_probs(decode_logits(vox, head));
  VoxelGrid g = probs_to_grid(probs2, cfg, {});
  for (int v : g.labels) CHECK(v == 3);

  // Probability columns are simplexes.
  for (int64_t v = 0; v < probs2.dim(1); ++v) {
    double s = 0;
    for (int c = 0; c < C; ++c) s += probs2.data()[c * probs2.dim(1) + v];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("miou hand examples") {
  VoxelGrid pred = VoxelGrid::empty_grid(2, 1, 1, 2);
  VoxelGrid gt = VoxelGrid::empty_grid(2, 1, 1, 2);
  gt.labels = {1, 1};
  pred.labels = {1, 0};
  IoUResult r = miou(pred, gt, 2);
  CHECK(r.iou[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.iou[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.miou == doctest::Approx(0.25).epsilon(1e-12));

  // Perfect prediction.
  pred.labels = gt.labels;
  CHECK(miou(pred, gt, 2).miou == doctest::Approx(1.0));

  // Complementary binary grids.
  pred.labels = {0, 0};
  gt.labels = {1, 1};
  CHECK(miou(pred, gt, 2).miou == doctest::Approx(0.0));
}

TEST_CASE("miou matches the confusion-matrix oracle over 1000 random grids") {
  Rng rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const int C = 2 + static_cast<int>(rng.next_below(15));  // <= 16
    const int W = 1 + static_cast<int>(rng.next_below(4));
    const int L = 1 + static_cast<int>(rng.next_below(4));
    const int H = 1 + static_cast<int>(rng.next_below(4));
    VoxelGrid pred = VoxelGrid::empty_grid(W, L, H, C);
    VoxelGrid gt = VoxelGrid::empty_grid(W, L, H, C);
    for (auto& v : pred.labels) v = static_cast<int>(rng.next_below(C));
    for (auto& v : gt.labels) v = static_cast<int>(rng.next_below(C));

    // Independent oracle: full confusion matrix, then per-class IoU.
    std::vector<int64_t> conf(static_cast<size_t>(C) * C, 0);
    for (size_t i = 0; i < pred.labels.size(); ++i)
      ++conf[static_cast<size_t>(gt.labels[i]) * C + pred.labels[i]];
    double acc = 0;
    int np = 0;
    for (int c = 0; c < C; ++c) {
      int64_t tp = conf[static_cast<size_t>(c) * C + c];
      int64_t gt_c = 0, pd_c = 0;
      for (int k = 0; k < C; ++k) {
        gt_c += conf[static_cast<size_t>(c) * C + k];
        pd_c += conf[static_cast<size_t>(k) * C + c];
      }
      const int64_t denom = gt_c + pd_c - tp;
      if (denom == 0) continue;
      acc += static_cast<double>(tp) / static_cast<double>(denom);
      ++np;
    }
    const double expect = np ? acc / np : 0.0;
    CHECK(std::fabs(miou(pred, gt, C).miou - expect) < 1e-12);
  }
}

TEST_CASE("voxel accuracy") {
  VoxelGrid a = VoxelGrid::empty_grid(2, 2, 1, 3);
  VoxelGrid b = VoxelGrid::empty_grid(2, 2, 1, 3);
  a.labels = {0, 1, 2, 1};
  b.labels = {0, 1, 1, 1};
  CHECK(voxel_accuracy(a, b) == doctest::Approx(0.75));
}
