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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "vslice/config.hpp"
#include "vslice/io.hpp"
#include "vslice/rng.hpp"

using namespace vslice;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vslice_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("run config parse, defaults, round trip, unknown keys") {
  RunConfig def;
  RunConfig parsed = parse_run_config(run_config_to_text(def));
  CHECK(parsed.scene.W == def.scene.W);
  CHECK(parsed.lr == def.lr);
  CHECK(parsed.renderer == def.renderer);
  CHECK(parsed.pca_first == def.pca_first);

  RunConfig c = parse_run_config(
      "# comment\nW = 8\nL = 8\nS = 2\nH_v = 4\nC = 3\nseed = 9\n"
      "lr = 0.001\npca_first = false\nrenderer = depth\n");
  CHECK(c.scene.W == 8);
  CHECK(c.seed == 9);
  CHECK(c.lr == doctest::Approx(0.001));
  CHECK(c.pca_first == false);

  CHECK_THROWS_WITH_AS(parse_run_config("nope = 3\n"),
                       doctest::Contains("unknown key"),
                       std::invalid_argument);
  CHECK_THROWS(parse_run_config("W 8\n"));
  CHECK_THROWS(parse_run_config("W = eight\n"));
  CHECK_THROWS(parse_run_config("S = 3\nH_v = 4\n"));  // indivisible
  CHECK_THROWS(parse_run_config("renderer = magic\n"));
}

TEST_CASE("grid export is bit-exact: 40x40x16 is 25618 bytes") {
  TempDir tmp;
  VoxelGrid g = VoxelGrid::empty_grid(40, 40, 16, 5);
  Rng rng(61);
  for (auto& v : g.labels) v = static_cast<int>(rng.next_below(5));
  SceneConfig scene;
  export_grid(g, tmp.file("g.socc"), scene);
  CHECK(fs::file_size(tmp.file("g.socc")) == 25618);

  // Header layout.
  std::ifstream in(tmp.file("g.socc"), std::ios::binary);
  char hdr[18];
  in.read(hdr, 18);
  CHECK(std::string(hdr, 4) == "SOCC");
  CHECK(static_cast<uint8_t>(hdr[4]) == 1);  // version LE
  CHECK(static_cast<uint8_t>(hdr[5]) == 0);
  CHECK(static_cast<uint8_t>(hdr[6]) == 40);  // W
  CHECK(static_cast<uint8_t>(hdr[10]) == 40);  // L
  CHECK(static_cast<uint8_t>(hdr[14]) == 16);  // H_v
}

TEST_CASE("grid round trip is lossless over random grids") {
  TempDir tmp;
  Rng rng(62);
  for (int t = 0; t < 50; ++t) {
    const int C = 2 + static_cast<int>(rng.next_below(20));
    VoxelGrid g = VoxelGrid::empty_grid(
        1 + static_cast<int>(rng.next_below(6)),
        1 + static_cast<int>(rng.next_below(6)),
        1 + static_cast<int>(rng.next_below(6)), C);
    for (auto& v : g.labels) v = static_cast<int>(rng.next_below(C));
    g.class_names.resize(C, "c");
    SceneConfig scene;
    export_grid(g, tmp.file("r.socc"), scene);
    VoxelGrid h = import_grid(tmp.file("r.socc"));
    CHECK(h.W == g.W);
    CHECK(h.L == g.L);
    CHECK(h.Hv == g.Hv);
    CHECK(h.C == g.C);
    CHECK(h.labels == g.labels);
  }
}

TEST_CASE("grid format errors are structured") {
  TempDir tmp;
  VoxelGrid g = VoxelGrid::empty_grid(2, 2, 2, 3);
  SceneConfig scene;
  export_grid(g, tmp.file("t.socc"), scene);

  // Truncations at various sections.
  const std::string full = [&] {
    std::ifstream in(tmp.file("t.socc"), std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  }();
  auto write_trunc = [&](size_t n, const std::string& name) {
    std::ofstream out(tmp.file(name), std::ios::binary);
    out.write(full.data(), static_cast<std::streamsize>(n));
  };
  write_trunc(2, "a.socc");
  CHECK_THROWS_WITH_AS(import_grid(tmp.file("a.socc")),
                       doctest::Contains("magic"), std::runtime_error);
  write_trunc(5, "b.socc");
  CHECK_THROWS_WITH_AS(import_grid(tmp.file("b.socc")),
                       doctest::Contains("version"), std::runtime_error);
  write_trunc(12, "c.socc");
  CHECK_THROWS_WITH_AS(import_grid(tmp.file("c.socc")),
                       doctest::Contains("truncated"), std::runtime_error);
  write_trunc(20, "d.socc");
  CHECK_THROWS_WITH_AS(import_grid(tmp.file("d.socc")),
                       doctest::Contains("payload"), std::runtime_error);

  // Bad magic.
  {
    std::string bad = full;
    bad[0] = 'X';
    std::ofstream out(tmp.file("e.socc"), std::ios::binary);
    out << bad;
  }
  CHECK_THROWS_WITH_AS(import_grid(tmp.file("e.socc")),
                       doctest::Contains("magic"), std::runtime_error);

  // C > 255 rejected.
  VoxelGrid big = VoxelGrid::empty_grid(1, 1, 1, 300);
  CHECK_THROWS(export_grid(big, tmp.file("f.socc"), scene));
}

TEST_CASE("checkpoint round trip restores parameters and config") {
  TempDir tmp;
  Rng rng(63);
  ParamStore a;
  a.add("w1", Tensor::uniform({3, 4}, 1.0, rng));
  a.add("b1", Tensor::uniform({4}, 1.0, rng));
  save_checkpoint(tmp.file("m.ckpt"), a, "W = 8\n");

  CHECK(checkpoint_config(tmp.file("m.ckpt")) == "W = 8\n");

  ParamStore b;
  b.add("w1", Tensor::zeros({3, 4}));
  b.add("b1", Tensor::zeros({4}));
  load_checkpoint(tmp.file("m.ckpt"), b);
  for (size_t i = 0; i < a.items.size(); ++i)
    CHECK(a.items[i].second.vec() == b.items[i].second.vec());

  // Shape mismatch and unknown names are structured errors.
  ParamStore bad;
  bad.add("w1", Tensor::zeros({4, 3}));
  bad.add("b1", Tensor::zeros({4}));
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("m.ckpt"), bad),
                       doctest::Contains("shape"), std::runtime_error);
  ParamStore missing;
  missing.add("other", Tensor::zeros({3, 4}));
  CHECK_THROWS(load_checkpoint(tmp.file("m.ckpt"), missing));
}
