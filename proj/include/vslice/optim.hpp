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

#include <cstdint>
#include <vector>

#include "vslice/tensor.hpp"

namespace vslice {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;  // decoupled, scaled by lr
};

/// AdamW with decoupled weight decay:
///   p -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
/// Moment buffers follow the ParamStore registration order; parameters
/// without an accumulated gradient are treated as having zero gradient.
class AdamW {
 public:
  AdamW(ParamStore& params, AdamWConfig cfg);

  void step();
  int64_t steps() const { return t_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  ParamStore& params_;
  AdamWConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace vslice
