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

// Compares the OpenMP kernel paths against the naive serial references:
// wall time plus the maximum absolute deviation (expected 0 for identical
// summation orders, tiny otherwise).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "vslice/kernels.hpp"
#include "vslice/rng.hpp"

using vslice::Rng;
namespace kern = vslice::kern;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count() /
         reps;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

std::vector<double> random_vec(size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

void report(const char* name, double t_serial, double t_omp, double diff) {
  std::printf("%-18s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx   "
              "max|diff| %.3g\n",
              name, t_serial * 1e3, t_omp * 1e3, t_serial / t_omp, diff);
}

}  // namespace

int main() {
  Rng rng(7);

  {
    const int M = 256, K = 256, N = 256;
    auto A = random_vec(static_cast<size_t>(M) * K, rng);
    auto B = random_vec(static_cast<size_t>(K) * N, rng);
    std::vector<double> c_ref(static_cast<size_t>(M) * N),
        c_omp(static_cast<size_t>(M) * N);
    const double ts =
        time_of([&] { kern::serial::matmul(A.data(), B.data(), c_ref.data(),
                                           M, K, N); },
                3);
    const double tp = time_of(
        [&] {
          kern::matmul(A.data(), B.data(), c_omp.data(), M, K, N, false, true);
        },
        3);
    report("matmul 256^3", ts, tp, max_abs_diff(c_ref, c_omp));
  }

  {
    const int C = 64, H = 128, W = 128, P = 200000;
    auto fm = random_vec(static_cast<size_t>(C) * H * W, rng);
    std::vector<double> pts(static_cast<size_t>(P) * 2);
    for (double& x : pts) x = rng.uniform(-0.1, 1.1);
    std::vector<double> o_ref(static_cast<size_t>(P) * C),
        o_omp(static_cast<size_t>(P) * C);
    const double ts = time_of(
        [&] {
          kern::serial::bilinear_gather(fm.data(), C, H, W, pts.data(), P,
                                        o_ref.data());
        },
        3);
    const double tp = time_of(
        [&] {
          kern::bilinear_gather(fm.data(), C, H, W, pts.data(), P,
                                o_omp.data(), true);
        },
        3);
    report("bilinear 200k pts", ts, tp, max_abs_diff(o_ref, o_omp));
  }

  {
    const int C = 16, D = 32, H = 32, W = 32, P = 100000;
    auto vol = random_vec(static_cast<size_t>(C) * D * H * W, rng);
    std::vector<double> pts(static_cast<size_t>(P) * 3);
    for (double& x : pts) x = rng.uniform(-0.1, 1.1);
    std::vector<double> o_ref(static_cast<size_t>(P) * C),
        o_omp(static_cast<size_t>(P) * C);
    const double ts = time_of(
        [&] {
          kern::serial::trilinear_gather(vol.data(), C, D, H, W, pts.data(), P,
                                         o_ref.data());
        },
        3);
    const double tp = time_of(
        [&] {
          kern::trilinear_gather(vol.data(), C, D, H, W, pts.data(), P,
                                 o_omp.data(), true);
        },
        3);
    report("trilinear 100k pts", ts, tp, max_abs_diff(o_ref, o_omp));
  }

  {
    const int Cin = 32, Cout = 32, X = 24, Y = 24, Z = 16;
    auto x = random_vec(static_cast<size_t>(Cin) * X * Y * Z, rng);
    auto w = random_vec(static_cast<size_t>(Cout) * Cin * 27, rng);
    auto b = random_vec(Cout, rng);
    std::vector<double> o_ref(static_cast<size_t>(Cout) * X * Y * Z),
        o_omp(o_ref.size());
    const double ts = time_of(
        [&] {
          kern::serial::conv3d_fwd(x.data(), w.data(), b.data(), o_ref.data(),
                                   Cin, Cout, X, Y, Z);
        },
        2);
    const double tp = time_of(
        [&] {
          kern::conv3d_fwd(x.data(), w.data(), b.data(), o_omp.data(), Cin,
                           Cout, X, Y, Z, true);
        },
        2);
    report("conv3d 32ch 24^2x16", ts, tp, max_abs_diff(o_ref, o_omp));
  }

  return 0;
}
