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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vslice/config.hpp"
#include "vslice/gradcheck.hpp"
#include "vslice/io.hpp"
#include "vslice/losses.hpp"
#include "vslice/model.hpp"
#include "vslice/occupancy.hpp"
#include "vslice/trainer.hpp"

namespace fs = std::filesystem;
using namespace vslice;

namespace {

struct CommonFlags {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config_path, "run configuration file");
  cmd->add_option("--seed", f->seed, "override the configured seed")
      ->each([f](const std::string&) { f->seed_set = true; });
  cmd->add_option("--out", f->out_dir, "output directory");
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg =
      f.config_path.empty() ? RunConfig{} : load_run_config(f.config_path);
  if (f.seed_set) cfg.seed = f.seed;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

RunConfig gradcheck_default_config() {
  RunConfig c;
  c.scene.W = 4;
  c.scene.L = 4;
  c.scene.S = 2;
  c.scene.H_v = 4;
  c.scene.N_r3d = 2;
  c.scene.C = 3;
  c.scene.layers = 1;
  c.scene.num_views = 2;
  c.D = 8;
  c.heads = 2;
  c.points = 1;
  c.ffn_hidden = 8;
  c.image_w = 9;
  c.image_h = 7;
  c.num_objects = 2;
  c.stacking = 1;
  c.steps = 0;
  // Central differences step across ReLU kinks on some seeds; the default
  // picks a draw whose activations stay clear of zero.
  c.seed = 3;
  return c;
}

int run_gradcheck(const CommonFlags& flags, const std::vector<double>& epss) {
  RunConfig cfg = flags.config_path.empty() ? gradcheck_default_config()
                                            : load_run_config(flags.config_path);
  if (flags.seed_set) cfg.seed = flags.seed;
  cfg.validate();

  bool ok = true;
  const std::vector<double> eps_list = epss.empty()
                                           ? std::vector<double>{1e-5}
                                           : epss;

  // Operator-level suite: composed differentiable ops against FD.
  for (double eps : eps_list) {
    Rng rng(cfg.seed + 17);
    ParamStore ps;
    Tensor w = ps.add("w", Tensor::uniform({6, 6}, 0.5, rng));
    Tensor b = ps.add("b", Tensor::uniform({6}, 0.5, rng));
    Tensor g = ps.add("g", Tensor::uniform({6}, 0.5, rng));
    Tensor fm = ps.add("fm", Tensor::uniform({2, 5, 7}, 0.5, rng));
    Tensor pts = ps.add("pts", Tensor::from_data({4, 2}, {0.31, 0.47, 0.62,
                                                          0.13, 0.55, 0.81,
                                                          0.22, 0.68}));
    Tensor x = Tensor::uniform({4, 6}, 0.5, rng);
    auto f = [&]() {
      Tensor h = relu(linear(x, w, b));
      h = layer_norm(h, g, b);
      Tensor sm = softmax(h, 1);
      Tensor s = bilinear_sample(fm, pts);
      return add(sum(sm), sum(s));
    };
    GradCheckReport rep = grad_check(f, ps, eps, 1e-6);
    std::printf("gradcheck ops eps=%g: %s\n", eps, rep.summary().c_str());
    ok = ok && rep.pass;
  }

  // Full pipeline: forward + all three losses through every parameter.
  for (double eps : eps_list) {
    OverfitSetup s = make_overfit_setup(cfg);
    const std::vector<int>& labels = s.gt.labels;
    auto f = [&]() {
      ForwardResult fwd = s.model->forward(s.images, s.scene.cameras);
      return compute_losses(fwd.probs, labels).l_total;
    };
    GradCheckReport rep = grad_check(f, s.model->params(), eps, 1e-4);
    std::printf("gradcheck pipeline eps=%g: %s\n", eps, rep.summary().c_str());
    ok = ok && rep.pass;
  }
  return ok ? 0 : 1;
}

void write_run_outputs(const RunConfig& cfg, const TrainResult& res,
                       const fs::path& dir) {
  fs::create_directories(dir);
  const std::string cfg_text = run_config_to_text(cfg);
  write_text(dir / "config.txt", cfg_text);
  write_text(dir / "metrics.csv", res.csv);
  write_text(dir / "scene.json", scene_to_json(res.scene));
  export_grid(res.pred, (dir / "pred.socc").string(), cfg.scene, cfg_text);
  export_grid(res.gt, (dir / "gt.socc").string(), cfg.scene, cfg_text);
  save_checkpoint((dir / "model.ckpt").string(), res.model->params(),
                  cfg_text);
}

int run_overfit(const CommonFlags& flags) {
  RunConfig cfg = resolve_config(flags);
  TrainResult res = train_overfit(cfg);
  write_run_outputs(cfg, res, cfg.out_dir);
  std::printf("overfit: steps=%d acc=%.4f mIoU=%.4f l_total=%.6f\n",
              res.steps_run, res.acc, res.miou, res.last.total);
  return 0;
}

int run_sweep(const CommonFlags& flags, const std::string& axis,
              const std::vector<int>& values) {
  RunConfig base = resolve_config(flags);
  if (values.empty()) throw std::runtime_error("sweep: no values given");
  std::string table = "value,mIoU,steps,wall_time_s\n";
  for (int v : values) {
    RunConfig cfg = base;
    if (axis == "slices") {
      cfg.scene.S = v;
      if (cfg.scene.H_v % v != 0)
        throw std::runtime_error("sweep: H_v not divisible by S=" +
                                 std::to_string(v));
    } else if (axis == "resolution") {
      cfg.scene.W = v;
      cfg.scene.L = v;
    } else if (axis == "layers") {
      cfg.scene.layers = v;
    } else if (axis == "views") {
      cfg.scene.num_views = v;
    } else {
      throw std::runtime_error("sweep: unknown axis " + axis);
    }
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult res = train_overfit(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const fs::path dir =
        fs::path(base.out_dir) / (axis + "_" + std::to_string(v));
    write_run_outputs(cfg, res, dir);
    char row[128];
    std::snprintf(row, sizeof(row), "%d,%.10f,%d,%.3f\n", v, res.miou,
                  res.steps_run, secs);
    table += row;
    std::printf("sweep %s=%d: mIoU=%.4f steps=%d time=%.1fs\n", axis.c_str(),
                v, res.miou, res.steps_run, secs);
  }
  fs::create_directories(base.out_dir);
  write_text(fs::path(base.out_dir) / "sweep.csv", table);
  return 0;
}

int run_export(const std::string& scene_path, const std::string& out_path) {
  std::ifstream in(scene_path, std::ios::binary);
  if (!in) throw std::runtime_error("export: cannot open " + scene_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  SyntheticScene scene = scene_from_json(text);
  VoxelGrid gt = scene_gt(scene);
  export_grid(gt, out_path, scene.cfg);
  std::printf("export: wrote %s (%dx%dx%d, %d classes)\n", out_path.c_str(),
              gt.W, gt.L, gt.Hv, gt.C);
  return 0;
}

int run_predict(const std::string& ckpt_path, const std::string& scene_path,
                const std::string& out_dir) {
  RunConfig cfg = parse_run_config(checkpoint_config(ckpt_path));
  std::ifstream in(scene_path, std::ios::binary);
  if (!in) throw std::runtime_error("predict: cannot open " + scene_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  SyntheticScene scene = scene_from_json(text);

  FeatureRenderer renderer;
  renderer.mode = renderer_mode_from_string(cfg.renderer);
  renderer.scales = cfg.feat_levels;
  auto images = render_views(scene, scene.cameras, renderer);
  SliceOccupancyModel model(cfg.model_config(),
                      renderer.channels(cfg.scene.C), cfg.seed);
  load_checkpoint(ckpt_path, model.params());

  ForwardResult fwd = model.forward(images, scene.cameras);
  VoxelGrid pred = probs_to_grid(fwd.probs, cfg.scene, scene.class_names);
  VoxelGrid gt = scene_gt(scene);
  const double acc = voxel_accuracy(pred, gt);
  const double mi = miou(pred, gt, cfg.scene.C).miou;

  fs::create_directories(out_dir);
  export_grid(pred, (fs::path(out_dir) / "pred.socc").string(), cfg.scene,
              run_config_to_text(cfg));
  std::printf("predict: acc=%.4f mIoU=%.4f -> %s/pred.socc\n", acc, mi,
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vertical-slice 3D semantic occupancy"};
  app.require_subcommand(1);

  CommonFlags gc_flags, of_flags, sw_flags;
  std::vector<double> gc_eps;
  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference suites");
  add_common(gc, &gc_flags);
  gc->add_option("--eps", gc_eps, "FD step sizes (repeatable)");

  CLI::App* of = app.add_subcommand("overfit", "train on one synthetic scene");
  add_common(of, &of_flags);

  std::string sw_axis = "slices";
  std::vector<int> sw_values;
  CLI::App* sw = app.add_subcommand("sweep", "ablation sweep");
  add_common(sw, &sw_flags);
  sw->add_option("--axis", sw_axis, "slices|resolution|layers|views");
  sw->add_option("--values", sw_values, "axis values")->required();

  std::string ex_scene, ex_out = "gt.socc";
  CLI::App* ex = app.add_subcommand("export", "export a scene's GT grid");
  ex->add_option("--scene", ex_scene, "scene JSON")->required();
  ex->add_option("--out", ex_out, "output grid path");

  std::string pr_ckpt, pr_scene, pr_out = "predict_out";
  CLI::App* pr = app.add_subcommand("predict", "run a checkpoint on a scene");
  pr->add_option("--ckpt", pr_ckpt, "checkpoint path")->required();
  pr->add_option("--scene", pr_scene, "scene JSON")->required();
  pr->add_option("--out", pr_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gc->parsed()) return run_gradcheck(gc_flags, gc_eps);
    if (of->parsed()) return run_overfit(of_flags);
    if (sw->parsed()) return run_sweep(sw_flags, sw_axis, sw_values);
    if (ex->parsed()) return run_export(ex_scene, ex_out);
    if (pr->parsed()) return run_predict(pr_ckpt, pr_scene, pr_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
