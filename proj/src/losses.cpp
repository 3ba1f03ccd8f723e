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

#include "vslice/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace vslice {

namespace {

constexpr double kEps = 1e-12;

void check_labels(int C, int64_t N, const std::vector<int>& labels) {
  if (static_cast<int64_t>(labels.size()) != N)
    throw std::invalid_argument("loss: label count does not match voxels");
  for (int v : labels)
    if (v < 0 || v >= C)
      throw std::invalid_argument("loss: label out of class range");
}

// One class's affinity terms; p [N] probabilities, in_c[i] = 1 when y_i = c.
// Ratios enter as log(numerator) - log(denominator) so a zero numerator
// degrades to the clamped log instead of dividing by anything.
Tensor scal_class(const Tensor& p, const std::vector<double>& in_c,
                  int64_t n_c, int64_t n_not) {
  const int N = p.dim(0);
  std::vector<double> not_c(in_c.size());
  for (size_t i = 0; i < in_c.size(); ++i) not_c[i] = 1.0 - in_c[i];

  Tensor tp = sum(mul(p, Tensor::from_data({N}, std::vector<double>(in_c))));
  Tensor mass = sum(p);
  Tensor acc = Tensor::zeros({1});
  if (mass.item() > 0.0)  // precision
    acc = add(acc, sub(log_clamped(tp, kEps), log_clamped(mass, kEps)));
  if (n_c > 0)  // recall
    acc = add(acc, add_scalar(log_clamped(tp, kEps),
                              -std::log(static_cast<double>(n_c))));
  if (n_not > 0) {  // specificity
    Tensor q = add_scalar(mul_scalar(p, -1.0), 1.0);  // 1 - p
    Tensor tn = sum(mul(q, Tensor::from_data({N}, std::move(not_c))));
    acc = add(acc, add_scalar(log_clamped(tn, kEps),
                              -std::log(static_cast<double>(n_not))));
  }
  return mul_scalar(acc, -1.0);
}

}  // namespace

Tensor loss_ce(const Tensor& probs, const std::vector<int>& labels) {
  if (probs.ndim() != 2)
    throw std::invalid_argument("loss_ce: probs must be [C, N]");
  const int C = probs.dim(0);
  const int64_t N = probs.dim(1);
  check_labels(C, N, labels);
  std::vector<double> onehot(static_cast<size_t>(C) * N, 0.0);
  for (int64_t i = 0; i < N; ++i)
    onehot[static_cast<size_t>(labels[i]) * N + i] = 1.0;
  Tensor picked = mul(log_clamped(probs, kEps),
                      Tensor::from_data(probs.shape(), std::move(onehot)));
  return mul_scalar(sum(picked), -1.0 / static_cast<double>(N));
}

Tensor loss_scal(const Tensor& probs, const std::vector<int>& labels,
                 ScalMode mode) {
  if (probs.ndim() != 2)
    throw std::invalid_argument("loss_scal: probs must be [C, N]");
  const int C = probs.dim(0);
  const int64_t N = probs.dim(1);
  check_labels(C, N, labels);

  Tensor acc = Tensor::zeros({1});
  int present = 0;
  if (mode == ScalMode::kGeometric) {
    Tensor occ = add_scalar(mul_scalar(row(probs, 0), -1.0), 1.0);
    std::vector<double> in_c(N, 0.0);
    int64_t n_c = 0;
    for (int64_t i = 0; i < N; ++i)
      if (labels[i] != 0) {
        in_c[i] = 1.0;
        ++n_c;
      }
    double mass = 0.0;
    for (double v : occ.vec()) mass += v;
    if (n_c > 0 || mass > 0.0) {
      acc = add(acc, scal_class(occ, in_c, n_c, N - n_c));
      ++present;
    }
  } else {
    std::vector<int64_t> counts(C, 0);
    for (int v : labels) ++counts[v];
    for (int c = 0; c < C; ++c) {
      Tensor p = row(probs, c);
      double mass = 0.0;
      for (double v : p.vec()) mass += v;
      if (counts[c] == 0 && mass <= 0.0) continue;
      std::vector<double> in_c(N, 0.0);
      for (int64_t i = 0; i < N; ++i)
        if (labels[i] == c) in_c[i] = 1.0;
      acc = add(acc, scal_class(p, in_c, counts[c], N - counts[c]));
      ++present;
    }
  }
  if (present == 0)
    throw std::invalid_argument("loss_scal: no class present in batch");
  return mul_scalar(acc, 1.0 / present);
}

LossReport compute_losses(const Tensor& probs,
                          const std::vector<int>& labels) {
  LossReport r;
  r.l_ce = loss_ce(probs, labels);
  r.l_geo = loss_scal(probs, labels, ScalMode::kGeometric);
  r.l_sem = loss_scal(probs, labels, ScalMode::kSemantic);
  r.l_total = add(add(r.l_ce, r.l_geo), r.l_sem);
  r.ce = r.l_ce.item();
  r.geo = r.l_geo.item();
  r.sem = r.l_sem.item();
  r.total = r.l_total.item();
  return r;
}

}  // namespace vslice
