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

#include <functional>
#include <string>

#include "vslice/tensor.hpp"

namespace vslice {

struct GradCheckReport {
  bool pass = false;
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_index = -1;
  double worst_analytic = 0.0;
  double worst_fd = 0.0;
  int64_t entries_checked = 0;
  double eps = 0.0;
  double tol = 0.0;

  std::string summary() const;
};

/// Compares reverse-mode gradients against central finite differences for
/// every entry of every parameter in `params`. `loss_fn` must rebuild the
/// graph from the current parameter values and return a scalar; it must be
/// deterministic. Relative error uses denominator max(|analytic|, |fd|, 1).
GradCheckReport grad_check(const std::function<Tensor()>& loss_fn,
                           ParamStore& params, double eps = 1e-5,
                           double tol = 1e-4);

}  // namespace vslice
