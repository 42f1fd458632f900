// Copyright (c) 2026 The styletok Authors
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

#include "styletok/numcore/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "styletok/error.hpp"

namespace styletok::num {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : s_(std::make_shared<Storage>()) {
  if (shape.empty()) throw DimensionError("tensor shape must have at least one extent");
  for (auto d : shape) {
    if (d == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
  }
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("shape " + shape_str(shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  s_->shape = std::move(shape);
  s_->values = std::move(values);
  s_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return filled(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::filled(Shape shape, double value, bool requires_grad) {
  const auto n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({1}, {value}, requires_grad); }

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
  const auto n = values.size();
  return Tensor({1, n}, std::move(values), requires_grad);
}

const Shape& Tensor::shape() const {
  if (!s_) throw ContractError("use of undefined tensor");
  return s_->shape;
}

std::size_t Tensor::numel() const { return values().size(); }

std::size_t Tensor::rows() const {
  const auto& sh = shape();
  if (sh.size() == 1) return 1;
  if (sh.size() != 2) throw DimensionError("expected 1-D or 2-D tensor, got " + shape_str(sh));
  return sh[0];
}

std::size_t Tensor::cols() const {
  const auto& sh = shape();
  if (sh.size() == 1) return sh[0];
  if (sh.size() != 2) throw DimensionError("expected 1-D or 2-D tensor, got " + shape_str(sh));
  return sh[1];
}

std::span<const double> Tensor::values() const {
  if (!s_) throw ContractError("use of undefined tensor");
  return s_->values;
}

std::span<double> Tensor::mutable_values() {
  if (!s_) throw ContractError("use of undefined tensor");
  return s_->values;
}

double Tensor::item() const {
  if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
  return s_->values[0];
}

bool Tensor::requires_grad() const { return s_ && s_->requires_grad; }

void Tensor::set_requires_grad(bool on) {
  if (!s_) throw ContractError("use of undefined tensor");
  s_->requires_grad = on;
}

bool Tensor::has_grad() const { return s_ && !s_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw ContractError("tensor has no gradient; run backward first");
  return s_->grad;
}

std::span<double> Tensor::grad_buffer() const {
  if (!s_) throw ContractError("use of undefined tensor");
  if (s_->grad.empty()) s_->grad.assign(s_->values.size(), 0.0);
  return s_->grad;
}

void Tensor::zero_grad() {
  if (s_ && !s_->grad.empty()) std::fill(s_->grad.begin(), s_->grad.end(), 0.0);
}

void Tensor::clear_grad() {
  if (s_) {
    s_->grad.clear();
    s_->grad.shrink_to_fit();
  }
}

Tensor Tensor::clone() const {
  Tensor t(shape(), s_->values, s_->requires_grad);
  t.s_->grad = s_->grad;
  return t;
}

}  // namespace styletok::num
