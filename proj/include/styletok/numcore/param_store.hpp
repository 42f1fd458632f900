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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "styletok/numcore/rng.hpp"
#include "styletok/numcore/tensor.hpp"

namespace styletok::num {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Float32 storage rounds parameters and optimizer moments to the nearest
// float after every write, so a training run's state is exactly
// representable in 32-bit checkpoints. Arithmetic stays in double.
enum class StoragePrecision { kFloat64, kFloat32 };

// Named trainable parameters with per-parameter Adam moments.
class ParamStore {
 public:
  explicit ParamStore(StoragePrecision precision = StoragePrecision::kFloat64)
      : precision_(precision) {}

  Tensor add(const std::string& name, Tensor value);
  Tensor add_zeros(const std::string& name, Shape shape);
  // Uniform in [-bound, bound].
  Tensor add_uniform(const std::string& name, Shape shape, Rng& rng, double bound);
  // Uniform in +-1/sqrt(fan_in), fan_in = first extent.
  Tensor add_scaled_uniform(const std::string& name, Shape shape, Rng& rng);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);
  // Insertion order.
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::size_t total_elements() const;

  void zero_grad();
  // L2 norm of all parameter gradients concatenated (missing grads count as zero).
  double grad_norm() const;
  // Scales gradients so their global norm is at most max_norm; returns the
  // norm before clipping.
  double clip_grad_norm(double max_norm);

  // One Adam step from the parameters' own gradients.
  void adam_update(const AdamConfig& cfg);
  // One Adam step from explicit gradients, one array per parameter in name order.
  void adam_update(std::span<const std::vector<double>> grads, const AdamConfig& cfg);

  std::uint64_t step() const { return t_; }
  const std::vector<double>& first_moment(const std::string& name) const;
  const std::vector<double>& second_moment(const std::string& name) const;
  void set_optimizer_state(std::uint64_t t, const std::string& name, std::vector<double> m,
                           std::vector<double> v);

  StoragePrecision precision() const { return precision_; }
  // Applies the storage rounding to every parameter value in place.
  void round_to_storage();

 private:
  void store_value(std::span<double> dst) const;

  StoragePrecision precision_;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t t_ = 0;
};

}  // namespace styletok::num
