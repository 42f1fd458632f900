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

// Central finite-difference oracle shared by the gradient tests. It only
// evaluates the forward function on an inference tape and never consults the
// implementation's backward closures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "styletok/numcore/ops.hpp"
#include "styletok/numcore/rng.hpp"

namespace styletok::testing {

using LossFn = std::function<num::Tensor(num::Tape&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

// Compares d loss / d p for every entry of every tensor in `params` against
// central differences with step h. `params` must be leaves with requires_grad.
inline GradCheckResult grad_check(const LossFn& loss_fn, std::vector<num::Tensor> params,
                                  double h = 1e-5) {
  for (auto& p : params) p.zero_grad();
  {
    num::Tape tape;
    const num::Tensor loss = loss_fn(tape);
    tape.backward(loss);
  }
  GradCheckResult result;
  for (auto& p : params) {
    const std::vector<double> analytic =
        p.has_grad() ? std::vector<double>(p.grad().begin(), p.grad().end())
                     : std::vector<double>(p.numel(), 0.0);
    auto values = p.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      double plus, minus;
      {
        num::Tape tape(num::Tape::Mode::kInference);
        plus = loss_fn(tape).item();
      }
      values[i] = saved - h;
      {
        num::Tape tape(num::Tape::Mode::kInference);
        minus = loss_fn(tape).item();
      }
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      result.max_rel_error = std::max(result.max_rel_error, relative_error(analytic[i], numeric));
      ++result.checked;
    }
  }
  return result;
}

inline num::Tensor random_tensor(num::Rng& rng, num::Shape shape, double lo = -1.0, double hi = 1.0,
                                 bool requires_grad = true) {
  std::vector<double> v(num::shape_numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return num::Tensor(std::move(shape), std::move(v), requires_grad);
}

// Random fixed projection so the scalar loss does not hide sign-symmetric errors.
inline num::Tensor project(num::Tape& tape, const num::Tensor& y, std::uint64_t seed) {
  num::Rng rng(seed);
  const num::Tensor weights = random_tensor(rng, y.shape(), -1.0, 1.0, false);
  return num::sum(tape, num::mul(tape, y, weights));
}

}  // namespace styletok::testing
