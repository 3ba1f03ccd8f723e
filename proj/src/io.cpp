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

#include "vslice/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace vslice {

namespace {

void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i)
    s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  std::string ctx;

  void need(size_t n, const char* section) {
    if (pos + n > buf.size())
      throw std::runtime_error(ctx + ": truncated at " + section);
  }
  uint16_t u16(const char* section) {
    need(2, section);
    uint16_t v = static_cast<uint8_t>(buf[pos]) |
                 (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1]))
                  << 8);
    pos += 2;
    return v;
  }
  uint32_t u32(const char* section) {
    need(4, section);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i]))
           << (8 * i);
    pos += 4;
    return v;
  }
  void bytes(void* dst, size_t n, const char* section) {
    need(n, section);
    std::memcpy(dst, buf.data() + pos, n);
    pos += n;
  }
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(std::string(what) + ": cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

void write_file(const std::string& path, const std::string& data,
                const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error(std::string(what) + ": cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out)
    throw std::runtime_error(std::string(what) + ": write failed for " + path);
}

}  // namespace

void export_grid(const VoxelGrid& grid, const std::string& path,
                 const SceneConfig& scene, const std::string& config_text) {
  grid.validate();
  if (grid.C > 255)
    throw std::invalid_argument(
        "export_grid: more than 255 classes exceeds the u8 payload");
  std::string out;
  out.reserve(18 + grid.labels.size());
  out += "SOCC";
  put_u16(out, 1);
  put_u32(out, static_cast<uint32_t>(grid.W));
  put_u32(out, static_cast<uint32_t>(grid.L));
  put_u32(out, static_cast<uint32_t>(grid.Hv));
  for (int v : grid.labels) out.push_back(static_cast<char>(v));
  write_file(path, out, "export_grid");

  nlohmann::json j;
  j["C"] = grid.C;
  j["class_names"] = grid.class_names;
  j["bounds"] = {{"x_min", scene.x_min}, {"x_max", scene.x_max},
                 {"y_min", scene.y_min}, {"y_max", scene.y_max},
                 {"z_min", scene.z_min}, {"z_max", scene.z_max}};
  if (!config_text.empty()) j["config"] = config_text;
  write_file(path + ".json", j.dump(2) + "\n", "export_grid");
}

VoxelGrid import_grid(const std::string& path) {
  const std::string buf = read_file(path, "import_grid");
  Reader r{buf, 0, "import_grid"};
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, "SOCC", 4) != 0)
    throw std::runtime_error("import_grid: bad magic (not a SOCC file)");
  const uint16_t version = r.u16("version");
  if (version != 1)
    throw std::runtime_error("import_grid: unsupported version " +
                             std::to_string(version));
  const uint32_t W = r.u32("W");
  const uint32_t L = r.u32("L");
  const uint32_t Hv = r.u32("H_v");
  const size_t n = static_cast<size_t>(W) * L * Hv;
  std::vector<uint8_t> payload(n);
  if (n > 0) r.bytes(payload.data(), n, "payload");
  if (r.pos != buf.size())
    throw std::runtime_error("import_grid: trailing bytes after payload");

  VoxelGrid g;
  g.W = static_cast<int>(W);
  g.L = static_cast<int>(L);
  g.Hv = static_cast<int>(Hv);
  g.labels.assign(payload.begin(), payload.end());
  int maxc = 0;
  for (int v : g.labels) maxc = std::max(maxc, v);
  g.C = maxc + 1;

  std::ifstream side(path + ".json");
  if (side) {
    nlohmann::json j;
    try {
      side >> j;
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("import_grid: bad sidecar: ") +
                               e.what());
    }
    if (j.contains("C")) g.C = j["C"].get<int>();
    if (j.contains("class_names"))
      g.class_names = j["class_names"].get<std::vector<std::string>>();
  }
  g.validate();
  return g;
}

void save_checkpoint(const std::string& path, const ParamStore& params,
                     const std::string& config_text) {
  std::string out;
  out += "VSCK";
  put_u16(out, 1);
  put_u32(out, static_cast<uint32_t>(params.items.size()));
  for (const auto& [name, t] : params.items) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<uint32_t>(t.ndim()));
    for (int i = 0; i < t.ndim(); ++i)
      put_u32(out, static_cast<uint32_t>(t.dim(i)));
    const size_t nb = t.vec().size() * sizeof(double);
    const size_t off = out.size();
    out.resize(off + nb);
    std::memcpy(&out[off], t.data(), nb);
  }
  put_u32(out, static_cast<uint32_t>(config_text.size()));
  out += config_text;
  write_file(path, out, "save_checkpoint");
}

namespace {

void read_checkpoint(const std::string& path, ParamStore* params,
                     std::string* config_text) {
  const std::string buf = read_file(path, "checkpoint");
  Reader r{buf, 0, "checkpoint"};
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, "VSCK", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  if (r.u16("version") != 1)
    throw std::runtime_error("checkpoint: unsupported version");
  const uint32_t count = r.u32("parameter count");
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t nlen = r.u32("name length");
    r.need(nlen, "name");
    std::string name = buf.substr(r.pos, nlen);
    r.pos += nlen;
    const uint32_t ndim = r.u32("rank");
    std::vector<int> shape(ndim);
    int64_t numel = 1;
    for (uint32_t d = 0; d < ndim; ++d) {
      shape[d] = static_cast<int>(r.u32("shape"));
      numel *= shape[d];
    }
    std::vector<double> data(static_cast<size_t>(numel));
    r.bytes(data.data(), data.size() * sizeof(double), "parameter data");
    if (params) {
      Tensor* t = params->find(name);
      if (!t)
        throw std::runtime_error("checkpoint: unknown parameter " + name);
      if (t->shape() != shape)
        throw std::runtime_error("checkpoint: shape mismatch for " + name);
      std::copy(data.begin(), data.end(), t->data());
    }
  }
  const uint32_t clen = r.u32("config length");
  r.need(clen, "config text");
  if (config_text) *config_text = buf.substr(r.pos, clen);
  r.pos += clen;
  if (r.pos != buf.size())
    throw std::runtime_error("checkpoint: trailing bytes");
}

}  // namespace

std::string checkpoint_config(const std::string& path) {
  std::string text;
  read_checkpoint(path, nullptr, &text);
  return text;
}

void load_checkpoint(const std::string& path, ParamStore& params) {
  read_checkpoint(path, &params, nullptr);
}

}  // namespace vslice
