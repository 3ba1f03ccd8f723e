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

#include "vslice/occupancy.hpp"

#include <cmath>
#include <stdexcept>

#include "vslice/ops.hpp"

namespace vslice {

VoxelGrid VoxelGrid::empty_grid(int W, int L, int Hv, int C) {
  VoxelGrid g;
  g.W = W;
  g.L = L;
  g.Hv = Hv;
  g.C = C;
  g.labels.assign(static_cast<size_t>(W) * L * Hv, 0);
  return g;
}

void VoxelGrid::validate() const {
  if (static_cast<int64_t>(labels.size()) != numel())
    throw std::invalid_argument("VoxelGrid: label count does not match dims");
  for (int v : labels)
    if (v < 0 || v >= C)
      throw std::invalid_argument("VoxelGrid: class index out of range");
}

FcnHead FcnHead::create(ParamStore& params, const std::string& prefix, int D,
                        int C, Rng& rng) {
  FcnHead h;
  const double b1v = 1.0 / std::sqrt(static_cast<double>(D) * 27);
  h.w1 = params.add(prefix + ".conv1.w",
                    Tensor::uniform({D, D, 3, 3, 3}, b1v, rng));
  h.b1 = params.add(prefix + ".conv1.b", Tensor::uniform({D}, b1v, rng));
  h.w2 = params.add(prefix + ".conv2.w",
                    Tensor::uniform({C, D, 3, 3, 3}, b1v, rng));
  h.b2 = params.add(prefix + ".conv2.b", Tensor::uniform({C}, b1v, rng));
  return h;
}

Tensor assemble_voxels(const std::vector<Tensor>& floors,
                       const std::vector<Tensor>& ceils,
                       const SceneConfig& cfg) {
  cfg.validate();
  const int S = cfg.S;
  if (static_cast<int>(floors.size()) != S ||
      static_cast<int>(ceils.size()) != S)
    throw std::invalid_argument("assemble_voxels: need S plane pairs");
  const int N = cfg.tokens();
  const int D = floors[0].dim(1);
  for (int i = 0; i < S; ++i) {
    if (floors[i].ndim() != 2 || floors[i].dim(0) != N ||
        floors[i].dim(1) != D || ceils[i].shape() != floors[i].shape())
      throw std::invalid_argument("assemble_voxels: bad plane shape");
  }
  const int Hv = cfg.H_v;
  const int m = Hv / S;  // voxel layers per slab
  const int W = cfg.W, L = cfg.L;

  std::vector<double> out(static_cast<size_t>(D) * N * Hv, 0.0);
  // out[d, (t*Hv + z)] with t = ix*L + iy; token lattice matches voxel x,y.
  for (int s = 0; s < S; ++s) {
    const double* pf = floors[s].data();
    const double* pc = ceils[s].data();
    for (int j = 0; j < m; ++j) {
      const double t = (j + 0.5) / m;
      const int z = s * m + j;
      for (int tok = 0; tok < N; ++tok) {
        const double* fr = pf + static_cast<size_t>(tok) * D;
        const double* cr = pc + static_cast<size_t>(tok) * D;
        for (int d = 0; d < D; ++d)
          out[(static_cast<size_t>(d) * N + tok) * Hv + z] =
              (1.0 - t) * fr[d] + t * cr[d];
      }
    }
  }

  std::vector<Tensor> parents;
  parents.reserve(2 * static_cast<size_t>(S));
  for (const auto& f : floors) parents.push_back(f);
  for (const auto& c : ceils) parents.push_back(c);
  Tensor tout = Tensor::make_node(
      {D, W, L, Hv}, std::move(out), std::move(parents),
      [S, m, N, D, Hv](TensorImpl& n) {
        for (int s = 0; s < S; ++s) {
          auto& fpar = n.parents[s];
          auto& cpar = n.parents[S + s];
          const bool nf = fpar.requires_grad();
          const bool nc = cpar.requires_grad();
          if (!nf && !nc) continue;
          for (int j = 0; j < m; ++j) {
            const double t = (j + 0.5) / m;
            const int z = s * m + j;
            for (int tok = 0; tok < N; ++tok)
              for (int d = 0; d < D; ++d) {
                const double g =
                    n.grad[(static_cast<size_t>(d) * N + tok) * Hv + z];
                if (nf)
                  fpar.grad()[static_cast<size_t>(tok) * D + d] +=
                      (1.0 - t) * g;
                if (nc)
                  cpar.grad()[static_cast<size_t>(tok) * D + d] += t * g;
              }
          }
        }
      });
  check_finite(tout, "assemble_voxels");
  return tout;
}

Tensor decode_logits(const Tensor& voxfeat, const FcnHead& head) {
  Tensor h = relu(conv3d(voxfeat, head.w1, head.b1));
  return conv3d(h, head.w2, head.b2);
}

Tensor decode_probs(const Tensor& logits) {
  const int C = logits.dim(0);
  const int64_t nvox = logits.numel() / C;
  Tensor flat = reshape(logits, {C, static_cast<int>(nvox)});
  return softmax(flat, 0);
}

VoxelGrid probs_to_grid(const Tensor& probs, const SceneConfig& cfg,
                        const std::vector<std::string>& class_names) {
  const int C = probs.dim(0);
  const int64_t nvox = probs.dim(1);
  if (nvox != static_cast<int64_t>(cfg.tokens()) * cfg.H_v)
    throw std::invalid_argument("probs_to_grid: voxel count mismatch");
  VoxelGrid g = VoxelGrid::empty_grid(cfg.W, cfg.L, cfg.H_v, C);
  g.class_names = class_names;
  for (int64_t v = 0; v < nvox; ++v) {
    int best = 0;
    double bestp = probs.data()[v];
    for (int c = 1; c < C; ++c) {
      const double p = probs.data()[static_cast<size_t>(c) * nvox + v];
      if (p > bestp) {
        bestp = p;
        best = c;
      }
    }
    g.labels[static_cast<size_t>(v)] = best;
  }
  return g;
}

IoUResult miou(const VoxelGrid& pred, const VoxelGrid& gt, int C) {
  if (pred.W != gt.W || pred.L != gt.L || pred.Hv != gt.Hv)
    throw std::invalid_argument("miou: grid dimension mismatch");
  std::vector<int64_t> tp(C, 0), fp(C, 0), fn(C, 0);
  for (size_t i = 0; i < pred.labels.size(); ++i) {
    const int p = pred.labels[i];
    const int g = gt.labels[i];
    if (p < 0 || p >= C || g < 0 || g >= C)
      throw std::invalid_argument("miou: label out of range");
    if (p == g) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  IoUResult r;
  r.iou.assign(C, 0.0);
  r.present.assign(C, false);
  int np = 0;
  double acc = 0.0;
  for (int c = 0; c < C; ++c) {
    const int64_t denom = tp[c] + fp[c] + fn[c];
    if (denom == 0) continue;
    r.present[c] = true;
    r.iou[c] = static_cast<double>(tp[c]) / static_cast<double>(denom);
    acc += r.iou[c];
    ++np;
  }
  r.miou = np > 0 ? acc / np : 0.0;
  return r;
}

double voxel_accuracy(const VoxelGrid& pred, const VoxelGrid& gt) {
  if (pred.labels.size() != gt.labels.size())
    throw std::invalid_argument("voxel_accuracy: grid size mismatch");
  int64_t ok = 0;
  for (size_t i = 0; i < pred.labels.size(); ++i)
    if (pred.labels[i] == gt.labels[i]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(pred.labels.size());
}

}  // namespace vslice
