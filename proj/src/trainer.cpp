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

#include "vslice/trainer.hpp"

#include <cstdio>

#include "vslice/occupancy.hpp"
#include "vslice/optim.hpp"

namespace vslice {

OverfitSetup make_overfit_setup(const RunConfig& cfg) {
  cfg.validate();
  OverfitSetup s;
  s.scene = generate_scene(cfg.scene, cfg.seed, cfg.num_objects, cfg.stacking,
                           cfg.image_w, cfg.image_h);
  s.gt = scene_gt(s.scene);
  s.renderer.mode = renderer_mode_from_string(cfg.renderer);
  s.renderer.scales = cfg.feat_levels;
  s.images = render_views(s.scene, s.scene.cameras, s.renderer);
  s.model = std::make_unique<SliceOccupancyModel>(
      cfg.model_config(), s.renderer.channels(cfg.scene.C), cfg.seed);
  return s;
}

namespace {

std::string csv_row(int step, const LossReport& r, double miou) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%d,%.10f,%.10f,%.10f,%.10f,%.10f\n", step,
                r.ce, r.geo, r.sem, r.total, miou);
  return buf;
}

}  // namespace

TrainResult train_overfit(const RunConfig& cfg) {
  OverfitSetup s = make_overfit_setup(cfg);
  AdamWConfig oc;
  oc.lr = cfg.lr;
  oc.weight_decay = cfg.weight_decay;
  AdamW opt(s.model->params(), oc);

  TrainResult res;
  res.gt = s.gt;
  res.csv = "step,l_ce,l_geo,l_sem,l_total,mIoU\n";

  const std::vector<int>& labels = s.gt.labels;
  for (int step = 0;; ++step) {
    ForwardResult fwd = s.model->forward(s.images, s.scene.cameras);
    LossReport rep = compute_losses(fwd.probs, labels);
    VoxelGrid pred =
        probs_to_grid(fwd.probs, cfg.scene, s.scene.class_names);
    const double acc = voxel_accuracy(pred, s.gt);
    const double mi = miou(pred, s.gt, cfg.scene.C).miou;

    const bool stop_early =
        cfg.early_stop_acc >= 0.0 && acc >= cfg.early_stop_acc &&
        (cfg.early_stop_miou < 0.0 || mi >= cfg.early_stop_miou);
    const bool last = step == cfg.steps || stop_early;
    if (step % cfg.eval_every == 0 || last)
      res.csv += csv_row(step, rep, mi);

    res.steps_run = step;
    res.acc = acc;
    res.miou = mi;
    res.last = rep;
    res.pred = std::move(pred);
    if (last) break;

    s.model->params().zero_grad();
    rep.l_total.backward();
    opt.step();
  }
  res.model = std::move(s.model);
  res.scene = std::move(s.scene);
  return res;
}

}  // namespace vslice
