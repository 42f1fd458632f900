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

#include "styletok/numcore/param_store.hpp"

#include <cmath>

#include "styletok/error.hpp"

namespace styletok::num {

Tensor ParamStore::add(const std::string& name, Tensor value) {
  if (contains(name)) throw ContractError("duplicate parameter name: " + name);
  value.set_requires_grad(true);
  store_value(value.mutable_values());
  index_[name] = params_.size();
  names_.push_back(name);
  m_.emplace_back(value.numel(), 0.0);
  v_.emplace_back(value.numel(), 0.0);
  params_.push_back(value);
  return value;
}

Tensor ParamStore::add_zeros(const std::string& name, Shape shape) {
  return add(name, Tensor::zeros(std::move(shape)));
}

Tensor ParamStore::add_uniform(const std::string& name, Shape shape, Rng& rng, double bound) {
  std::vector<double> values(shape_numel(shape));
  for (auto& v : values) v = rng.uniform(-bound, bound);
  return add(name, Tensor(std::move(shape), std::move(values)));
}

Tensor ParamStore::add_scaled_uniform(const std::string& name, Shape shape, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(shape.front()));
  return add_uniform(name, std::move(shape), rng, bound);
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter: " + name);
  return params_[it->second];
}

Tensor& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter: " + name);
  return params_[it->second];
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double ParamStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    if (!p.has_grad()) continue;
    for (double g : p.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double ParamStore::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (auto& p : params_) {
      if (!p.has_grad()) continue;
      for (auto& g : p.grad_buffer()) g *= factor;
    }
  }
  return norm;
}

void ParamStore::adam_update(const AdamConfig& cfg) {
  std::vector<std::vector<double>> grads;
  grads.reserve(params_.size());
  for (const auto& p : params_) {
    if (p.has_grad()) {
      grads.emplace_back(p.grad().begin(), p.grad().end());
    } else {
      grads.emplace_back(p.numel(), 0.0);
    }
  }
  adam_update(grads, cfg);
}

void ParamStore::adam_update(std::span<const std::vector<double>> grads, const AdamConfig& cfg) {
  if (grads.size() != params_.size()) {
    throw DimensionError("adam_update: " + std::to_string(grads.size()) + " gradients for " +
                         std::to_string(params_.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (grads[i].size() != params_[i].numel()) {
      throw DimensionError("adam_update: gradient for " + names_[i] + " has " +
                           std::to_string(grads[i].size()) + " entries, parameter " +
                           shape_str(params_[i].shape()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto w = params_[i].mutable_values();
    auto& m = m_[i];
    auto& v = v_[i];
    const auto& g = grads[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    store_value(w);
    store_value(m);
    store_value(v);
  }
}

const std::vector<double>& ParamStore::first_moment(const std::string& name) const {
  get(name);
  return m_[index_.at(name)];
}

const std::vector<double>& ParamStore::second_moment(const std::string& name) const {
  get(name);
  return v_[index_.at(name)];
}

void ParamStore::set_optimizer_state(std::uint64_t t, const std::string& name,
                                     std::vector<double> m, std::vector<double> v) {
  const std::size_t i = index_.count(name) ? index_.at(name) : throw ContractError("unknown parameter: " + name);
  if (m.size() != params_[i].numel() || v.size() != params_[i].numel()) {
    throw DimensionError("optimizer state for " + name + " does not match " +
                         shape_str(params_[i].shape()));
  }
  m_[i] = std::move(m);
  v_[i] = std::move(v);
  t_ = t;
}

void ParamStore::round_to_storage() {
  for (auto& p : params_) store_value(p.mutable_values());
}

void ParamStore::store_value(std::span<double> dst) const {
  if (precision_ != StoragePrecision::kFloat32) return;
  for (auto& x : dst) x = static_cast<double>(static_cast<float>(x));
}

}  // namespace styletok::num
