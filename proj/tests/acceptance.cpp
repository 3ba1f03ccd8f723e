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
//
// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "vslice/decoder.hpp"
#include "vslice/gradcheck.hpp"
#include "vslice/io.hpp"
#include "vslice/losses.hpp"
#include "vslice/occupancy.hpp"
#include "vslice/ops.hpp"
#include "vslice/optim.hpp"
#include "vslice/scene.hpp"
#include "vslice/trainer.hpp"

using namespace vslice;
namespace fs = std::filesystem;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

struct Criterion {
  int id;
  std::string name;
  std::function<std::string()> run;  // empty string = pass, else reason
};

// ---------------------------------------------------------------------------
// Criterion 1: gradient fidelity.

std::string check_gradients() {
  // Per-op composite: linear -> relu -> layer_norm -> softmax plus a
  // bilinear-sampling branch, all parameters checked against central FD.
  {
    Rng rng(101);
    ParamStore ps;
    Tensor x = ps.add("x", Tensor::uniform({4, 6}, 0.8, rng));
    Tensor w = ps.add("w", Tensor::uniform({6, 6}, 0.5, rng));
    Tensor b = ps.add("b", Tensor::uniform({6}, 0.5, rng));
    Tensor g = ps.add("g", Tensor::uniform({6}, 0.5, rng));
    Tensor bb = ps.add("bb", Tensor::uniform({6}, 0.5, rng));
    Tensor fm = ps.add("fm", Tensor::uniform({3, 5, 7}, 1.0, rng));
    std::vector<double> pd;
    for (int i = 0; i < 16; ++i) pd.push_back(rng.uniform(0.12, 0.88));
    Tensor pts = ps.add("pts", Tensor::from_data({8, 2}, std::move(pd)));
    Tensor mix = Tensor::uniform({4, 6}, 1.0, rng);
    Tensor mix2 = Tensor::uniform({8, 3}, 1.0, rng);
    auto f = [&]() {
      Tensor h = softmax(layer_norm(relu(linear(x, w, b)), g, bb), 1);
      Tensor s = bilinear_sample(fm, pts);
      return add(sum(mul(h, mix)), sum(mul(s, mix2)));
    };
    GradCheckReport r = grad_check(f, ps, 1e-5, 1e-6);
    if (!r.pass) return "op check: " + r.summary();
  }

  // Full pipeline: 1 layer, S=2, 4x4 slice planes, 2 views, D=8, the
  // combined cross-entropy + affinity losses.
  {
    RunConfig cfg;
    cfg.scene.W = 4;
    cfg.scene.L = 4;
    cfg.scene.S = 2;
    cfg.scene.H_v = 4;
    cfg.scene.N_r3d = 2;
    cfg.scene.C = 3;
    cfg.scene.layers = 1;
    cfg.scene.num_views = 2;
    cfg.D = 8;
    cfg.heads = 2;
    cfg.points = 1;
    cfg.ffn_hidden = 8;
    cfg.image_w = 9;
    cfg.image_h = 7;
    cfg.num_objects = 2;
    cfg.stacking = 1;
    cfg.seed = 3;
    cfg.validate();
    OverfitSetup s = make_overfit_setup(cfg);
    auto f = [&]() {
      ForwardResult r = s.model->forward(s.images, s.scene.cameras);
      return compute_losses(r.probs, s.gt.labels).l_total;
    };
    GradCheckReport r = grad_check(f, s.model->params(), 1e-5, 1e-4);
    if (!r.pass) return "pipeline check: " + r.summary();
  }
  return "";
}

// ---------------------------------------------------------------------------
// Criterion 2: oracle equivalence.

// Independent scalar-loop deformable attention used only for checking.
std::vector<double> oracle_deform(const Tensor& query, const Tensor& refs,
                                  const std::vector<Tensor>& raw_values,
                                  const DeformAttnParams& p) {
  const int Nq = query.dim(0), D = p.D;
  const int R = p.refs, P = p.points, H = p.heads;
  const int spl = H * R * P, K = p.levels * spl, Dh = D / H;

  // Value-project each level pixel by pixel.
  std::vector<std::vector<double>> vp(raw_values.size());
  for (size_t l = 0; l < raw_values.size(); ++l) {
    const Tensor& fm = raw_values[l];
    const int C = fm.dim(0), Hl = fm.dim(1), Wl = fm.dim(2);
    vp[l].assign(static_cast<size_t>(D) * Hl * Wl, 0.0);
    for (int y = 0; y < Hl; ++y)
      for (int x = 0; x < Wl; ++x)
        for (int d = 0; d < D; ++d) {
          double v = p.b_val.data()[d];
          for (int c = 0; c < C; ++c)
            v += p.w_val.data()[d * C + c] * fm.data()[(c * Hl + y) * Wl + x];
          vp[l][(static_cast<size_t>(d) * Hl + y) * Wl + x] = v;
        }
  }
  auto bilin = [&](int l, int d, double py, double px) {
    const int Hl = raw_values[l].dim(1), Wl = raw_values[l].dim(2);
    const double gy = py * (Hl - 1), gx = px * (Wl - 1);
    const int y0 = static_cast<int>(std::floor(gy));
    const int x0 = static_cast<int>(std::floor(gx));
    double acc = 0;
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const int y = y0 + dy, x = x0 + dx;
        if (y < 0 || y >= Hl || x < 0 || x >= Wl) continue;
        const double wy = 1.0 - std::fabs(gy - y);
        const double wx = 1.0 - std::fabs(gx - x);
        acc += wy * wx * vp[l][(static_cast<size_t>(d) * Hl + y) * Wl + x];
      }
    return acc;
  };

  std::vector<double> out(static_cast<size_t>(Nq) * D, 0.0);
  for (int q = 0; q < Nq; ++q) {
    std::vector<double> off(static_cast<size_t>(K) * 2), logit(K);
    for (int j = 0; j < K * 2; ++j) {
      double v = p.b_off.data()[j];
      for (int d = 0; d < D; ++d)
        v += p.w_off.data()[j * D + d] * query.data()[q * D + d];
      off[j] = v;
    }
    double mx = -1e300;
    for (int k = 0; k < K; ++k) {
      double v = p.b_att.data()[k];
      for (int d = 0; d < D; ++d)
        v += p.w_att.data()[k * D + d] * query.data()[q * D + d];
      logit[k] = v;
      mx = std::max(mx, v);
    }
    double z = 0;
    for (int k = 0; k < K; ++k) z += std::exp(logit[k] - mx);

    std::vector<double> agg(D, 0.0);
    for (int l = 0; l < p.levels; ++l)
      for (int h = 0; h < H; ++h)
        for (int r = 0; r < R; ++r)
          for (int pt = 0; pt < P; ++pt) {
            const int k = l * spl + (h * R + r) * P + pt;
            const double w = std::exp(logit[k] - mx) / z;
            const double py =
                refs.data()[(q * R + r) * 2 + 0] + off[k * 2 + 0];
            const double px =
                refs.data()[(q * R + r) * 2 + 1] + off[k * 2 + 1];
            for (int d = h * Dh; d < (h + 1) * Dh; ++d)
              agg[d] += w * bilin(l, d, py, px);
          }
    for (int dout = 0; dout < D; ++dout) {
      double v = p.b_out.data()[dout];
      for (int d = 0; d < D; ++d) v += p.w_out.data()[dout * D + d] * agg[d];
      out[static_cast<size_t>(q) * D + dout] = v;
    }
  }
  return out;
}

std::string check_oracles() {
  // Deformable attention vs the dense-gather oracle.
  {
    Rng rng(201);
    const int D = 8, Nq = 6, R = 3;
    ParamStore ps;
    DeformAttnParams p =
        DeformAttnParams::create(ps, "da", D, 2, 2, 2, R, rng);
    for (double& v : p.w_off.vec()) v = rng.uniform(-0.15, 0.15);
    for (double& v : p.b_off.vec()) v = rng.uniform(-0.1, 0.1);
    for (double& v : p.w_att.vec()) v = rng.uniform(-0.6, 0.6);
    for (double& v : p.b_att.vec()) v = rng.uniform(-0.4, 0.4);
    Tensor query = Tensor::uniform({Nq, D}, 1.0, rng);
    std::vector<double> rd;
    for (int i = 0; i < Nq * R * 2; ++i) rd.push_back(rng.uniform(0.1, 0.9));
    Tensor refs = Tensor::from_data({Nq * R, 2}, std::move(rd));
    std::vector<Tensor> values = {Tensor::uniform({D, 5, 7}, 1.0, rng),
                                  Tensor::uniform({D, 3, 4}, 1.0, rng)};
    Tensor got = deformable_attention(query, refs, values, p);
    std::vector<double> want = oracle_deform(query, refs, values, p);
    double worst = 0;
    for (int64_t i = 0; i < got.numel(); ++i)
      worst = std::max(worst, std::fabs(got.data()[i] - want[i]));
    if (worst >= 1e-10) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "deformable attention err %.3e", worst);
      return buf;
    }
  }

  // mIoU vs the confusion-matrix oracle over 1000 random grids.
  {
    Rng rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
      const int C = 2 + static_cast<int>(rng.next_below(15));
      const int W = 1 + static_cast<int>(rng.next_below(4));
      const int L = 1 + static_cast<int>(rng.next_below(4));
      const int H = 1 + static_cast<int>(rng.next_below(4));
      VoxelGrid pred = VoxelGrid::empty_grid(W, L, H, C);
      VoxelGrid gt = VoxelGrid::empty_grid(W, L, H, C);
      for (auto& v : pred.labels) v = static_cast<int>(rng.next_below(C));
      for (auto& v : gt.labels) v = static_cast<int>(rng.next_below(C));
      std::vector<int64_t> conf(static_cast<size_t>(C) * C, 0);
      for (size_t i = 0; i < pred.labels.size(); ++i)
        ++conf[static_cast<size_t>(gt.labels[i]) * C + pred.labels[i]];
      double acc = 0;
      int np = 0;
      for (int c = 0; c < C; ++c) {
        int64_t tp = conf[static_cast<size_t>(c) * C + c];
        int64_t g = 0, pr = 0;
        for (int k = 0; k < C; ++k) {
          g += conf[static_cast<size_t>(c) * C + k];
          pr += conf[static_cast<size_t>(k) * C + c];
        }
        if (g + pr == 0) continue;
        acc += static_cast<double>(tp) / static_cast<double>(g + pr - tp);
        ++np;
      }
      const double expect = np ? acc / np : 0.0;
      if (std::fabs(miou(pred, gt, C).miou - expect) >= 1e-12)
        return "mIoU mismatch at trial " + std::to_string(trial);
    }
  }

  // Synthetic GT vs brute-force point-in-box.
  {
    SceneConfig cfg;
    cfg.W = 8;
    cfg.L = 8;
    cfg.S = 2;
    cfg.H_v = 4;
    cfg.N_r3d = 2;
    cfg.C = 4;
    cfg.layers = 1;
    cfg.num_views = 4;
    SyntheticScene s = generate_scene(cfg, 13, 4, 2, 24, 18);
    VoxelGrid gt = scene_gt(s);
    for (int x = 0; x < cfg.W; ++x)
      for (int y = 0; y < cfg.L; ++y)
        for (int z = 0; z < cfg.H_v; ++z) {
          const Vec2 xy = token_world_xy(cfg, x, y);
          const double zc =
              cfg.z_min + (z + 0.5) * cfg.scene_height() / cfg.H_v;
          int expect = 0;
          for (const auto& box : s.boxes)
            if (box.contains({xy[0], xy[1], zc})) expect = box.cls;
          if (gt.at(x, y, z) != expect) return "GT mismatch";
        }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Criterion 3: interpolation exactness.

std::string check_interpolation() {
  SceneConfig cfg;
  cfg.W = 5;
  cfg.L = 4;
  cfg.S = 3;
  cfg.H_v = 12;
  cfg.N_r3d = 1;
  cfg.C = 2;
  cfg.layers = 1;
  cfg.num_views = 1;
  const int D = 2;
  Rng rng(301);
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
          const double expect =
              (1 - t) * field(d, ix, iy, s) + t * field(d, ix, iy, s + 1);
          const double got =
              v.data()[((static_cast<size_t>(d) * cfg.W + ix) * cfg.L + iy) *
                           cfg.H_v +
                       z];
          if (std::fabs(got - expect) >= 1e-9) return "reconstruction error";
        }
  return "";
}

// ---------------------------------------------------------------------------
// Criterion 4: end-to-end overfit.

RunConfig overfit_base() {
  RunConfig cfg;
  cfg.scene.C = 5;  // 4 object classes + empty
  cfg.scene.W = 20;
  cfg.scene.L = 20;
  cfg.scene.S = 4;
  cfg.scene.H_v = 4;
  cfg.scene.N_r3d = 2;
  cfg.scene.layers = 2;
  cfg.scene.num_views = 8;
  cfg.D = 64;
  cfg.heads = 2;
  cfg.points = 1;
  cfg.ffn_hidden = 64;
  cfg.image_w = 32;
  cfg.image_h = 24;
  cfg.num_objects = 4;
  cfg.stacking = 2;
  cfg.seed = 21;
  cfg.lr = 1e-4;
  cfg.steps = 3000;
  cfg.eval_every = 25;
  cfg.early_stop_acc = 0.95;
  cfg.early_stop_miou = 0.85;
  cfg.validate();
  return cfg;
}

std::string check_overfit() {
  const double t0 = now_s();
  TrainResult r = train_overfit(overfit_base());
  const double dt = now_s() - t0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "acc=%.4f mIoU=%.4f steps=%d wall=%.0fs", r.acc, r.miou,
                r.steps_run, dt);
  if (r.acc < 0.95 || r.miou < 0.85 || dt > 900.0) return buf;
  std::printf("  overfit: %s\n", buf);
  return "";
}

// ---------------------------------------------------------------------------
// Criteria 5 and 6: trend sweeps.

RunConfig sweep_base() {
  RunConfig cfg;
  cfg.scene.C = 5;
  cfg.scene.W = 10;
  cfg.scene.L = 10;
  cfg.scene.S = 2;
  cfg.scene.H_v = 16;
  cfg.scene.N_r3d = 2;
  cfg.scene.layers = 1;
  cfg.scene.num_views = 6;
  cfg.D = 32;
  cfg.heads = 2;
  cfg.points = 1;
  cfg.ffn_hidden = 32;
  cfg.image_w = 24;
  cfg.image_h = 18;
  cfg.num_objects = 6;
  cfg.stacking = 3;
  cfg.seed = 33;
  cfg.lr = 5e-4;
  cfg.steps = 60;  // short budget: vertical capacity must pay off quickly
  cfg.eval_every = 20;
  cfg.validate();
  return cfg;
}

std::string check_slice_trend() {
  std::vector<double> mious;
  std::string detail;
  for (int S : {1, 2, 4}) {
    RunConfig cfg = sweep_base();
    cfg.scene.S = S;
    cfg.validate();
    TrainResult r = train_overfit(cfg);
    mious.push_back(r.miou);
    char buf[48];
    std::snprintf(buf, sizeof buf, " S=%d:%.4f", S, r.miou);
    detail += buf;
  }
  std::printf("  slice sweep:%s\n", detail.c_str());
  if (mious[1] < mious[0] || mious[2] < mious[1])
    return "not non-decreasing:" + detail;
  if (mious[2] < mious[0] + 0.05) return "S=4 gain < 0.05:" + detail;
  return "";
}

std::string check_layer_trend() {
  std::vector<double> mious;
  std::string detail;
  for (int layers : {1, 3}) {
    RunConfig cfg = sweep_base();
    cfg.scene.layers = layers;
    cfg.steps = 120;
    cfg.validate();
    TrainResult r = train_overfit(cfg);
    mious.push_back(r.miou);
    char buf[48];
    std::snprintf(buf, sizeof buf, " layers=%d:%.4f", layers, r.miou);
    detail += buf;
  }
  std::printf("  layer sweep:%s\n", detail.c_str());
  if (mious[1] < mious[0] - 0.01) return "3-layer degraded:" + detail;
  return "";
}

// ---------------------------------------------------------------------------
// Criterion 7: loss identities.

std::string check_loss_identities() {
  // Uniform CE = ln C.
  {
    Tensor probs = Tensor::full({82, 10}, 1.0 / 82);
    std::vector<int> labels(10, 3);
    if (std::fabs(loss_ce(probs, labels).item() - std::log(82.0)) >= 1e-9)
      return "uniform CE != ln C";
  }
  // Perfect predictions: total loss ~ 0.
  {
    std::vector<int> labels = {0, 1, 2, 1, 0, 2};
    const int N = 6;
    std::vector<double> d(static_cast<size_t>(3) * N, 0.0);
    for (int i = 0; i < N; ++i)
      d[static_cast<size_t>(labels[i]) * N + i] = 1.0;
    Tensor probs = Tensor::from_data({3, N}, std::move(d));
    if (compute_losses(probs, labels).total > 1e-6)
      return "perfect-prediction loss > 1e-6";
  }
  // Geometric affinity hand value 3 ln 2.
  {
    const int N = 8;
    Tensor probs = Tensor::full({2, N}, 0.5);
    std::vector<int> labels(N, 0);
    for (int i = 0; i < N / 2; ++i) labels[i] = 1;
    const double got = loss_scal(probs, labels, ScalMode::kGeometric).item();
    if (std::fabs(got - 3.0 * std::log(2.0)) >= 1e-9)
      return "geometric hand example mismatch";
  }
  // Additivity of the combined loss is exact.
  {
    Rng rng(701);
    const int C = 3, N = 16;
    std::vector<double> d(static_cast<size_t>(C) * N);
    for (int i = 0; i < N; ++i) {
      double z = 0;
      for (int c = 0; c < C; ++c) {
        d[static_cast<size_t>(c) * N + i] = rng.uniform(0.05, 1.0);
        z += d[static_cast<size_t>(c) * N + i];
      }
      for (int c = 0; c < C; ++c) d[static_cast<size_t>(c) * N + i] /= z;
    }
    Tensor p = Tensor::from_data({C, N}, std::move(d));
    std::vector<int> lab(N);
    for (auto& v : lab) v = static_cast<int>(rng.next_below(C));
    LossReport r = compute_losses(p, lab);
    if (std::fabs(r.total - (r.ce + r.geo + r.sem)) >= 1e-12)
      return "additivity not exact";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Criterion 8: determinism.

std::string check_determinism() {
  RunConfig cfg;
  cfg.scene.W = 6;
  cfg.scene.L = 6;
  cfg.scene.S = 2;
  cfg.scene.H_v = 4;
  cfg.scene.N_r3d = 2;
  cfg.scene.C = 3;
  cfg.scene.layers = 1;
  cfg.scene.num_views = 2;
  cfg.D = 8;
  cfg.heads = 2;
  cfg.points = 1;
  cfg.ffn_hidden = 8;
  cfg.image_w = 12;
  cfg.image_h = 9;
  cfg.num_objects = 2;
  cfg.stacking = 1;
  cfg.seed = 81;
  cfg.steps = 20;
  cfg.eval_every = 5;
  cfg.validate();

  const fs::path tmp =
      fs::temp_directory_path() / "vslice_acceptance_determinism";
  fs::create_directories(tmp);
  std::vector<std::string> csvs, grids;
  for (int run = 0; run < 2; ++run) {
    TrainResult r = train_overfit(cfg);
    csvs.push_back(r.csv);
    const std::string path =
        (tmp / ("run" + std::to_string(run) + ".socc")).string();
    export_grid(r.pred, path, cfg.scene);
    std::ifstream in(path, std::ios::binary);
    grids.emplace_back((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  }
  fs::remove_all(tmp);
  if (csvs[0] != csvs[1]) return "metric CSVs differ";
  if (grids[0] != grids[1]) return "exported grids differ";
  if (csvs[0].empty() || grids[0].empty()) return "empty outputs";
  return "";
}

// ---------------------------------------------------------------------------
// Criterion 9: export format.

std::string check_format() {
  const fs::path tmp = fs::temp_directory_path() / "vslice_acceptance_format";
  fs::create_directories(tmp);
  SceneConfig scene;
  std::string err;

  // Round trip over random grids.
  Rng rng(901);
  for (int t = 0; t < 25 && err.empty(); ++t) {
    const int C = 2 + static_cast<int>(rng.next_below(20));
    VoxelGrid g = VoxelGrid::empty_grid(
        1 + static_cast<int>(rng.next_below(6)),
        1 + static_cast<int>(rng.next_below(6)),
        1 + static_cast<int>(rng.next_below(6)), C);
    for (auto& v : g.labels) v = static_cast<int>(rng.next_below(C));
    const std::string path = (tmp / "r.socc").string();
    export_grid(g, path, scene);
    VoxelGrid h = import_grid(path);
    if (h.W != g.W || h.L != g.L || h.Hv != g.Hv || h.labels != g.labels)
      err = "round trip not lossless";
  }

  // 40x40x16 grid: 18-byte header + 25,600-byte payload.
  if (err.empty()) {
    VoxelGrid g = VoxelGrid::empty_grid(40, 40, 16, 5);
    for (size_t i = 0; i < g.labels.size(); ++i) g.labels[i] = i % 5;
    const std::string path = (tmp / "g.socc").string();
    export_grid(g, path, scene);
    if (fs::file_size(path) != 25618) err = "40x40x16 export size mismatch";
  }
  fs::remove_all(tmp);
  return err;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "gradient fidelity", check_gradients},
      {2, "oracle equivalence", check_oracles},
      {3, "interpolation exactness", check_interpolation},
      {4, "end-to-end overfit", check_overfit},
      {5, "slice-number trend", check_slice_trend},
      {6, "layer trend", check_layer_trend},
      {7, "loss identities", check_loss_identities},
      {8, "determinism", check_determinism},
      {9, "export format", check_format},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    std::string reason;
    try {
      reason = c.run();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    if (reason.empty()) {
      std::printf("criterion %d (%s): PASS\n", c.id, c.name.c_str());
    } else {
      std::printf("criterion %d (%s): FAIL — %s\n", c.id, c.name.c_str(),
                  reason.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
