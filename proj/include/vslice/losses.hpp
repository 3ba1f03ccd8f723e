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

#include <vector>

#include "vslice/ops.hpp"
#include "vslice/tensor.hpp"

namespace vslice {

/// Mean negative log-likelihood over voxels. probs [C, N] columns are
/// per-voxel simplexes; labels holds N class indices. Probabilities are
/// clamped at 1e-12 before the log.
Tensor loss_ce(const Tensor& probs, const std::vector<int>& labels);

enum class ScalMode { kGeometric, kSemantic };

/// Scene-class affinity loss. Per class c present in the batch (at least one
/// GT voxel or nonzero predicted mass):
///   precision  P_c = sum(p_c * [y=c]) / sum(p_c)
///   recall     R_c = sum(p_c * [y=c]) / count(y=c)
///   specificity S_c = sum((1-p_c) * [y!=c]) / count(y!=c)
/// loss = -(1/|present|) * sum_c (log P_c + log R_c + log S_c), every log
/// clamped at 1e-12 and each ratio skipped when its denominator is zero.
/// Geometric mode scores the single binary class "occupied" with
/// p = 1 - P(empty) against y != 0. Throws when no class is present.
Tensor loss_scal(const Tensor& probs, const std::vector<int>& labels,
                 ScalMode mode);

struct LossReport {
  Tensor l_ce, l_geo, l_sem, l_total;  // l_total = exact tensor sum
  double ce = 0.0, geo = 0.0, sem = 0.0, total = 0.0;
};

LossReport compute_losses(const Tensor& probs, const std::vector<int>& labels);

}  // namespace vslice
