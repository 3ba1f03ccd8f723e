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

#include "vslice/gradcheck.hpp"

#include <cmath>
#include <cstdio>

namespace vslice {

std::string GradCheckReport::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s: max rel err %.3e (tol %.1e, eps %.1e) over %lld entries"
                "%s%s",
                pass ? "PASS" : "FAIL", max_rel_err, tol, eps,
                static_cast<long long>(entries_checked),
                worst_param.empty() ? "" : ", worst ",
                worst_param.c_str());
  return std::string(buf);
}

GradCheckReport grad_check(const std::function<Tensor()>& loss_fn,
                           ParamStore& params, double eps, double tol) {
  GradCheckReport rep;
  rep.eps = eps;
  rep.tol = tol;

  auto eval = [&]() {
    Tensor loss = loss_fn();
    const double v = loss.item();
    if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite loss");
    return v;
  };

  // Analytic pass.
  params.zero_grad();
  Tensor loss = loss_fn();
  if (!std::isfinite(loss.item()))
    throw std::runtime_error("grad_check: non-finite loss");
  loss.backward();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.items.size());
  for (auto& [name, t] : params.items) analytic.push_back(t.grad());

  for (size_t pi = 0; pi < params.items.size(); ++pi) {
    auto& [name, t] = params.items[pi];
    double* data = t.data();
    for (int64_t i = 0; i < t.numel(); ++i) {
      const double saved = data[i];
      data[i] = saved + eps;
      const double lp = eval();
      data[i] = saved - eps;
      const double lm = eval();
      data[i] = saved;
      const double fd = (lp - lm) / (2.0 * eps);
      const double an = analytic[pi][static_cast<size_t>(i)];
      const double denom = std::max({std::fabs(an), std::fabs(fd), 1.0});
      const double rel = std::fabs(an - fd) / denom;
      ++rep.entries_checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name;
        rep.worst_index = i;
        rep.worst_analytic = an;
        rep.worst_fd = fd;
      }
    }
  }
  rep.pass = rep.max_rel_err < tol;
  return rep;
}

}  // namespace vslice
