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

#include "vslice/optim.hpp"

#include <cmath>

namespace vslice {

AdamW::AdamW(ParamStore& params, AdamWConfig cfg)
    : params_(params), cfg_(cfg) {
  m_.resize(params_.items.size());
  v_.resize(params_.items.size());
  for (size_t i = 0; i < params_.items.size(); ++i) {
    const size_t n = params_.items[i].second.vec().size();
    m_[i].assign(n, 0.0);
    v_[i].assign(n, 0.0);
  }
}

void AdamW::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.items.size(); ++i) {
    Tensor& p = params_.items[i].second;
    const bool has_g = p.has_grad();
    double* pd = p.data();
    const std::vector<double>* g = has_g ? &p.grad() : nullptr;
    for (size_t j = 0; j < m_[i].size(); ++j) {
      const double gj = has_g ? (*g)[j] : 0.0;
      m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * gj;
      v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * gj * gj;
      const double mhat = m_[i][j] / bc1;
      const double vhat = v_[i][j] / bc2;
      pd[j] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                          cfg_.weight_decay * pd[j]);
    }
  }
}

}  // namespace vslice
