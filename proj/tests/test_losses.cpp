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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "vslice/gradcheck.hpp"
#include "vslice/losses.hpp"
#include "vslice/optim.hpp"
#include "vslice/rng.hpp"

using namespace vslice;

namespace {

Tensor uniform_probs(int C, int N) {
  return Tensor::full({C, N}, 1.0 / C);
}

Tensor onehot_probs(const std::vector<int>& labels, int C) {
  const int N = static_cast<int>(labels.size());
  std::vector<double> d(static_cast<size_t>(C) * N, 0.0);
  for (int i = 0; i < N; ++i) d[static_cast<size_t>(labels[i]) * N + i] = 1.0;
  return Tensor::from_data({C, N}, std::move(d));
}

}  // namespace

TEST_CASE("cross entropy closed forms") {
  // Uniform probabilities, C=82 -> ln 82.
  std::vector<int> labels(10, 3);
  CHECK(loss_ce(uniform_probs(82, 10), labels).item() ==
        doctest::Approx(std::log(82.0)).epsilon(1e-9));

  // Perfect one-hot -> ~0 after clamping.
  std::vector<int> l2 = {0, 1, 2, 1};
  CHECK(loss_ce(onehot_probs(l2, 3), l2).item() <= 1e-9);

  CHECK_THROWS(loss_ce(uniform_probs(3, 4), std::vector<int>{0, 1}));
  CHECK_THROWS(loss_ce(uniform_probs(3, 2), std::vector<int>{0, 5}));
}

TEST_CASE("scal geometric hand example: 3 ln 2") {
  // Occupied probability 0.5 everywhere, half the voxels occupied:
  // P = R = S = 0.5 -> loss = 3 ln 2.
  const int N = 8;
  Tensor probs = Tensor::full({2, N}, 0.5);  // row 0 = empty prob 0.5
  std::vector<int> labels(N, 0);
  for (int i = 0; i < N / 2; ++i) labels[i] = 1;
  const double loss =
      loss_scal(probs, labels, ScalMode::kGeometric).item();
  CHECK(loss == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("scal perfect predictions are ~0 and losses are non-negative") {
  std::vector<int> labels = {0, 1, 2, 1, 0, 2};
  Tensor probs = onehot_probs(labels, 3);
  CHECK(loss_scal(probs, labels, ScalMode::kSemantic).item() <= 1e-6);
  CHECK(loss_scal(probs, labels, ScalMode::kGeometric).item() <= 1e-6);
  CHECK(loss_ce(probs, labels).item() <= 1e-6);

  Rng rng(51);
  for (int t = 0; t < 20; ++t) {
    const int C = 3, N = 12;
    std::vector<double> d(static_cast<size_t>(C) * N);
    for (int i = 0; i < N; ++i) {
      double z = 0;
      for (int c = 0; c < C; ++c) {
        d[static_cast<size_t>(c) * N + i] = rng.uniform(0.01, 1.0);
        z += d[static_cast<size_t>(c) * N + i];
      }
      for (int c = 0; c < C; ++c) d[static_cast<size_t>(c) * N + i] /= z;
    }
    Tensor p = Tensor::from_data({C, N}, std::move(d));
    std::vector<int> lab(N);
    for (auto& v : lab) v = static_cast<int>(rng.next_below(C));
    CHECK(loss_ce(p, lab).item() >= 0.0);
    CHECK(loss_scal(p, lab, ScalMode::kSemantic).item() >= 0.0);
    CHECK(loss_scal(p, lab, ScalMode::kGeometric).item() >= 0.0);
  }
}

TEST_CASE("scal is permutation invariant over voxel order") {
  Rng rng(52);
  const int C = 4, N = 10;
  std::vector<double> d(static_cast<size_t>(C) * N);
  for (int i = 0; i < N; ++i) {
    double z = 0;
    for (int c = 0; c < C; ++c) {
      d[static_cast<size_t>(c) * N + i] = rng.uniform(0.05, 1.0);
      z += d[static_cast<size_t>(c) * N + i];
    }
    for (int c = 0; c < C; ++c) d[static_cast<size_t>(c) * N + i] /= z;
  }
  std::vector<int> lab(N);
  for (auto& v : lab) v = static_cast<int>(rng.next_below(C));

  std::vector<int> perm(N);
  for (int i = 0; i < N; ++i) perm[i] = (i * 7 + 3) % N;
  std::vector<double> dp(static_cast<size_t>(C) * N);
  std::vector<int> labp(N);
  for (int i = 0; i < N; ++i) {
    labp[i] = lab[perm[i]];
    for (int c = 0; c < C; ++c)
      dp[static_cast<size_t>(c) * N + i] =
          d[static_cast<size_t>(c) * N + perm[i]];
  }
  Tensor a = Tensor::from_data({C, N}, std::move(d));
  Tensor b = Tensor::from_data({C, N}, std::move(dp));
  CHECK(loss_scal(a, lab, ScalMode::kSemantic).item() ==
        doctest::Approx(loss_scal(b, labp, ScalMode::kSemantic).item())
            .epsilon(1e-12));
  CHECK(loss_scal(a, lab, ScalMode::kGeometric).item() ==
        doctest::Approx(loss_scal(b, labp, ScalMode::kGeometric).item())
            .epsilon(1e-12));
}

TEST_CASE("loss report additivity is exact") {
  Rng rng(53);
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
  CHECK(std::fabs(r.total - (r.ce + r.geo + r.sem)) < 1e-12);
}

TEST_CASE("loss gradients match finite differences") {
  Rng rng(54);
  const int C = 3, N = 6;
  ParamStore ps;
  Tensor logits = ps.add("logits", Tensor::uniform({C, N}, 0.7, rng));
  std::vector<int> lab(N);
  for (auto& v : lab) v = static_cast<int>(rng.next_below(C));
  auto f = [&]() {
    Tensor probs = softmax(logits, 0);
    return compute_losses(probs, lab).l_total;
  };
  GradCheckReport rep = grad_check(f, ps, 1e-6, 1e-6);
  CHECK_MESSAGE(rep.pass, rep.summary());
}

TEST_CASE("degenerate scal batch throws") {
  // All mass on "empty" and an all-empty GT: the geometric binary class has
  // zero GT presence and zero occupied mass.
  Tensor p = Tensor::from_data({2, 3}, {1, 1, 1, 0, 0, 0});
  std::vector<int> lab = {0, 0, 0};
  CHECK_THROWS(loss_scal(p, lab, ScalMode::kGeometric));
}

TEST_CASE("adamw contracts") {
  // lr = 0 leaves parameters untouched.
  {
    ParamStore ps;
    Rng rng(55);
    Tensor w = ps.add("w", Tensor::uniform({4}, 1.0, rng));
    std::vector<double> before(w.data(), w.data() + w.numel());
    AdamWConfig cfg;
    cfg.lr = 0.0;
    AdamW opt(ps, cfg);
    Tensor l = sum(mul(w, w));
    ps.zero_grad();
    l.backward();
    opt.step();
    for (int i = 0; i < 4; ++i) CHECK(w.data()[i] == before[i]);
  }

  // Quadratic toy objective converges to its minimum within 1e-6.
  {
    ParamStore ps;
    Tensor w = ps.add("w", Tensor::from_data({2}, {2.0, -1.5}));
    Tensor target = Tensor::from_data({2}, {0.7, -0.3});
    AdamWConfig cfg;
    cfg.lr = 1e-2;
    cfg.weight_decay = 0.0;
    AdamW opt(ps, cfg);
    double last = 1e9;
    for (int i = 0; i < 5000; ++i) {
      ps.zero_grad();
      Tensor d = sub(w, target);
      Tensor l = sum(mul(d, d));
      last = l.item();
      if (last < 1e-12) break;
      l.backward();
      opt.step();
    }
    CHECK(std::fabs(w.data()[0] - 0.7) < 1e-3);
    CHECK(std::fabs(w.data()[1] + 0.3) < 1e-3);
    CHECK(last < 1e-6);
  }

  // Determinism: identical seeds give identical trajectories.
  {
    auto run = [] {
      ParamStore ps;
      Rng rng(56);
      Tensor w = ps.add("w", Tensor::uniform({3}, 1.0, rng));
      AdamW opt(ps, {});
      std::vector<double> losses;
      for (int i = 0; i < 25; ++i) {
        ps.zero_grad();
        Tensor l = sum(mul(w, w));
        losses.push_back(l.item());
        l.backward();
        opt.step();
      }
      return losses;
    };
    CHECK(run() == run());
  }
}
