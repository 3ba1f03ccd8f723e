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
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vslice/rng.hpp"

namespace vslice {

class Tensor;

struct TensorImpl {
  std::vector<int> shape;
  std::vector<double> data;   // row-major
  std::vector<double> grad;   // empty until requested
  bool requires_grad = false;
  std::vector<Tensor> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(TensorImpl&)> backward_fn;
};

/// Dense 64-bit float tensor with reverse-mode differentiation. Ops build a
/// graph of shared nodes; Tensor is a cheap value handle. Tensors that
/// participate in a graph are never mutated in place.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor full(std::vector<int> shape, double value,
                     bool requires_grad = false);
  static Tensor from_data(std::vector<int> shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  /// Entries uniform in [-bound, bound].
  static Tensor uniform(std::vector<int> shape, double bound, Rng& rng,
                        bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const std::vector<int>& shape() const { return impl_->shape; }
  int dim(int i) const { return impl_->shape.at(i); }
  int ndim() const { return static_cast<int>(impl_->shape.size()); }
  int64_t numel() const { return static_cast<int64_t>(impl_->data.size()); }

  double* data() { return impl_->data.data(); }
  const double* data() const { return impl_->data.data(); }
  std::vector<double>& vec() { return impl_->data; }
  const std::vector<double>& vec() const { return impl_->data; }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool v) { impl_->requires_grad = v; }

  bool has_grad() const { return !impl_->grad.empty(); }
  std::vector<double>& grad();  // allocates zeros on first use
  void zero_grad();

  double item() const;
  double at(std::initializer_list<int> idx) const;

  /// Reverse-mode sweep from a scalar root. Seeds d(root)/d(root)=1 and
  /// visits the graph in reverse topological order.
  void backward();

  TensorImpl* impl() const { return impl_.get(); }

  // Used by op implementations.
  static Tensor make_node(std::vector<int> shape, std::vector<double> data,
                          std::vector<Tensor> parents,
                          std::function<void(TensorImpl&)> backward_fn);

 private:
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<TensorImpl> impl_;
};

/// Toggle the NaN/Inf scan that runs after every forward op (on by default).
void set_finite_checks(bool enabled);
bool finite_checks_enabled();

/// Throws if any entry of t is NaN or Inf.
void check_finite(const Tensor& t, const char* op_name);

int64_t shape_numel(const std::vector<int>& shape);

/// Ordered registry of named trainable tensors. Iteration order is the
/// registration order, which fixes the order of optimizer updates and
/// gradient checks.
struct ParamStore {
  std::vector<std::pair<std::string, Tensor>> items;

  Tensor add(const std::string& name, Tensor t) {
    t.set_requires_grad(true);
    items.emplace_back(name, t);
    return t;
  }
  Tensor* find(const std::string& name) {
    for (auto& [n, t] : items)
      if (n == name) return &t;
    return nullptr;
  }
  void zero_grad() {
    for (auto& [n, t] : items) t.zero_grad();
  }
  int64_t total_entries() const {
    int64_t n = 0;
    for (const auto& [name, t] : items) n += t.numel();
    return n;
  }
};

}  // namespace vslice
