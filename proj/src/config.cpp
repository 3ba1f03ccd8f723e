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

#include "vslice/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vslice {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

}  // namespace

void RunConfig::validate() const {
  scene.validate();
  if (D <= 0 || heads <= 0 || points <= 0 || feat_levels <= 0 ||
      ffn_hidden <= 0)
    throw std::invalid_argument("config: model sizes must be positive");
  if (D % heads != 0)
    throw std::invalid_argument("config: D must be divisible by heads");
  if (steps < 0 || eval_every <= 0)
    throw std::invalid_argument("config: bad step counts");
  if (lr < 0.0 || weight_decay < 0.0)
    throw std::invalid_argument("config: negative optimizer rates");
  if (num_objects < 1 || stacking < 0)
    throw std::invalid_argument("config: bad scene object counts");
  if (image_w < 2 || image_h < 2)
    throw std::invalid_argument("config: image must be at least 2x2");
  renderer_mode_from_string(renderer);  // throws on unknown mode
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.scene = scene;
  m.D = D;
  m.heads = heads;
  m.points = points;
  m.feat_levels = feat_levels;
  m.ffn_hidden = ffn_hidden;
  m.pca_first = pca_first;
  m.renderer = renderer_mode_from_string(renderer);
  return m;
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " has no '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " has an empty key or value");
    try {
      if (key == "x_min") c.scene.x_min = std::stod(val);
      else if (key == "x_max") c.scene.x_max = std::stod(val);
      else if (key == "y_min") c.scene.y_min = std::stod(val);
      else if (key == "y_max") c.scene.y_max = std::stod(val);
      else if (key == "z_min") c.scene.z_min = std::stod(val);
      else if (key == "z_max") c.scene.z_max = std::stod(val);
      else if (key == "W") c.scene.W = std::stoi(val);
      else if (key == "L") c.scene.L = std::stoi(val);
      else if (key == "S") c.scene.S = std::stoi(val);
      else if (key == "N_r3d") c.scene.N_r3d = std::stoi(val);
      else if (key == "H_v") c.scene.H_v = std::stoi(val);
      else if (key == "C") c.scene.C = std::stoi(val);
      else if (key == "layers") c.scene.layers = std::stoi(val);
      else if (key == "num_views") c.scene.num_views = std::stoi(val);
      else if (key == "pillar_span_scale")
        c.scene.pillar_span_scale = std::stod(val);
      else if (key == "seed") c.seed = std::stoull(val);
      else if (key == "D") c.D = std::stoi(val);
      else if (key == "heads") c.heads = std::stoi(val);
      else if (key == "points") c.points = std::stoi(val);
      else if (key == "feat_levels") c.feat_levels = std::stoi(val);
      else if (key == "ffn_hidden") c.ffn_hidden = std::stoi(val);
      else if (key == "renderer") c.renderer = val;
      else if (key == "pca_first") c.pca_first = parse_bool(val, key);
      else if (key == "steps") c.steps = std::stoi(val);
      else if (key == "lr") c.lr = std::stod(val);
      else if (key == "weight_decay") c.weight_decay = std::stod(val);
      else if (key == "eval_every") c.eval_every = std::stoi(val);
      else if (key == "early_stop_acc") c.early_stop_acc = std::stod(val);
      else if (key == "early_stop_miou") c.early_stop_miou = std::stod(val);
      else if (key == "num_objects") c.num_objects = std::stoi(val);
      else if (key == "stacking") c.stacking = std::stoi(val);
      else if (key == "image_w") c.image_w = std::stoi(val);
      else if (key == "image_h") c.image_h = std::stoi(val);
      else if (key == "out_dir") c.out_dir = val;
      else
        throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for " + key + ": " + val);
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_text(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "x_min = " << c.scene.x_min << "\n";
  o << "x_max = " << c.scene.x_max << "\n";
  o << "y_min = " << c.scene.y_min << "\n";
  o << "y_max = " << c.scene.y_max << "\n";
  o << "z_min = " << c.scene.z_min << "\n";
  o << "z_max = " << c.scene.z_max << "\n";
  o << "W = " << c.scene.W << "\n";
  o << "L = " << c.scene.L << "\n";
  o << "S = " << c.scene.S << "\n";
  o << "N_r3d = " << c.scene.N_r3d << "\n";
  o << "H_v = " << c.scene.H_v << "\n";
  o << "C = " << c.scene.C << "\n";
  o << "layers = " << c.scene.layers << "\n";
  o << "num_views = " << c.scene.num_views << "\n";
  o << "pillar_span_scale = " << c.scene.pillar_span_scale << "\n";
  o << "seed = " << c.seed << "\n";
  o << "D = " << c.D << "\n";
  o << "heads = " << c.heads << "\n";
  o << "points = " << c.points << "\n";
  o << "feat_levels = " << c.feat_levels << "\n";
  o << "ffn_hidden = " << c.ffn_hidden << "\n";
  o << "renderer = " << c.renderer << "\n";
  o << "pca_first = " << (c.pca_first ? "true" : "false") << "\n";
  o << "steps = " << c.steps << "\n";
  o << "lr = " << c.lr << "\n";
  o << "weight_decay = " << c.weight_decay << "\n";
  o << "eval_every = " << c.eval_every << "\n";
  o << "early_stop_acc = " << c.early_stop_acc << "\n";
  o << "early_stop_miou = " << c.early_stop_miou << "\n";
  o << "num_objects = " << c.num_objects << "\n";
  o << "stacking = " << c.stacking << "\n";
  o << "image_w = " << c.image_w << "\n";
  o << "image_h = " << c.image_h << "\n";
  o << "out_dir = " << c.out_dir << "\n";
  return o.str();
}

}  // namespace vslice
