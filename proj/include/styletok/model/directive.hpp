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

#include <cstddef>
#include <string>
#include <vector>

namespace styletok::model {

class StyleDirective {
 public:
  enum class Kind { kNone, kForce, kBias, kInterpolate };

  static StyleDirective none() { return StyleDirective(Kind::kNone, 0, {}); }
  static StyleDirective force(std::size_t token) { return StyleDirective(Kind::kForce, token, {}); }
  // Added to every token row before the style encoder. Several biases are
  // applied by summing them first.
  static StyleDirective bias(std::vector<double> offset) { return StyleDirective(Kind::kBias, 0, std::move(offset)); }
  // Replaces the style attention weights with `weights` as given.
  static StyleDirective interpolate(std::vector<double> weights) {
    return StyleDirective(Kind::kInterpolate, 0, std::move(weights));
  }

  Kind kind() const { return kind_; }
  std::size_t token() const { return token_; }
  const std::vector<double>& values() const { return values_; }

  // ContractError for a bad force index or non-finite values,
  // DimensionError for a length that does not match the model.
  void validate(std::size_t n_tokens, std::size_t d_tok) const;

  std::string describe() const;

 private:
  StyleDirective(Kind kind, std::size_t token, std::vector<double> values)
      : kind_(kind), token_(token), values_(std::move(values)) {}

  Kind kind_;
  std::size_t token_;
  std::vector<double> values_;
};

}  // namespace styletok::model
