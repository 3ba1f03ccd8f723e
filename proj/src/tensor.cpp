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

#include "vslice/tensor.hpp"

#include <cmath>
#include <unordered_set>

namespace vslice {

namespace {
bool g_finite_checks = true;
}

void set_finite_checks(bool enabled) { g_finite_checks = enabled; }
bool finite_checks_enabled() { return g_finite_checks; }

void check_finite(const Tensor& t, const char* op_name) {
  if (!g_finite_checks) return;
  const double* p = t.data();
  const int64_t n = t.numel();
  for (int64_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i])) {
      throw std::runtime_error(std::string("non-finite value after op '") +
                               op_name + "' at flat index " +
                               std::to_string(i));
    }
  }
}

int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative dimension in shape");
    n *= d;
  }
  return n;
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  auto impl = std::make_shared<TensorImpl>();
  impl->data.assign(static_cast<size_t>(shape_numel(shape)), 0.0);
  impl->shape = std::move(shape);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (auto& v : t.vec()) v = value;
  return t;
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data,
                         bool requires_grad) {
  if (static_cast<int64_t>(data.size()) != shape_numel(shape))
    throw std::invalid_argument("from_data: data length does not match shape");
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({1}, {value}, requires_grad);
}

Tensor Tensor::uniform(std::vector<int> shape, double bound, Rng& rng,
                       bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (auto& v : t.vec()) v = rng.uniform(-bound, bound);
  return t;
}

std::vector<double>& Tensor::grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() { impl_->grad.clear(); }

double Tensor::item() const {
  if (numel() != 1) throw std::logic_error("item() on non-scalar tensor");
  return impl_->data[0];
}

double Tensor::at(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != ndim())
    throw std::invalid_argument("at(): index rank mismatch");
  int64_t flat = 0;
  int i = 0;
  for (int v : idx) {
    if (v < 0 || v >= impl_->shape[i])
      throw std::out_of_range("at(): index out of range");
    flat = flat * impl_->shape[i] + v;
    ++i;
  }
  return impl_->data[static_cast<size_t>(flat)];
}

Tensor Tensor::make_node(std::vector<int> shape, std::vector<double> data,
                         std::vector<Tensor> parents,
                         std::function<void(TensorImpl&)> backward_fn) {
  Tensor t = from_data(std::move(shape), std::move(data));
  bool needs = false;
  for (const auto& p : parents)
    if (p.defined() && p.requires_grad()) needs = true;
  if (needs) {
    t.impl_->requires_grad = true;
    t.impl_->parents = std::move(parents);
    t.impl_->backward_fn = std::move(backward_fn);
  }
  return t;
}

void Tensor::backward() {
  if (numel() != 1)
    throw std::logic_error("backward() must start from a scalar");
  // Post-order DFS (iterative) for a reverse topological order.
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> seen;
  struct Frame {
    TensorImpl* node;
    size_t next_parent;
  };
  std::vector<Frame> stack;
  if (impl_->requires_grad) stack.push_back({impl_.get(), 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent == 0) {
      if (seen.count(f.node)) {
        stack.pop_back();
        continue;
      }
      seen.insert(f.node);
    }
    if (f.next_parent < f.node->parents.size()) {
      TensorImpl* p = f.node->parents[f.next_parent++].impl();
      if (p && p->requires_grad && !seen.count(p)) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  grad()[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* node = *it;
    if (node->backward_fn) {
      if (node->grad.empty()) node->grad.assign(node->data.size(), 0.0);
      for (auto& parent : node->parents) {
        if (parent.defined() && parent.requires_grad()) parent.grad();
      }
      node->backward_fn(*node);
    }
  }
}

}  // namespace vslice
