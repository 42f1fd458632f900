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

#include <cmath>
#include <sstream>

#include "styletok/error.hpp"
#include "styletok/model/config.hpp"
#include "styletok/model/directive.hpp"

namespace styletok::model {

void ModelConfig::validate() const {
  const std::size_t sizes[] = {alphabet, n_tokens, d_tok, d_txt, d_enc, d_att, d_dec,
                               r,        n_mels,   n_linear_bins, prenet1, prenet2, d_post};
  for (auto s : sizes) {
    if (s == 0) throw ContractError("model config: every size must be positive");
  }
  if (d_enc % 2 != 0) throw ContractError("model config: d_enc must be even (split across two directions)");
  if (!(prenet_dropout >= 0.0 && prenet_dropout < 1.0)) throw ContractError("model config: prenet_dropout must be in [0, 1)");
  if (!std::isfinite(silence_threshold)) throw ContractError("model config: silence_threshold must be finite");
}

void StyleDirective::validate(std::size_t n_tokens, std::size_t d_tok) const {
  switch (kind_) {
    case Kind::kNone:
      return;
    case Kind::kForce:
      if (token_ >= n_tokens) {
        throw ContractError("force(" + std::to_string(token_) + ") out of range for K=" + std::to_string(n_tokens));
      }
      return;
    case Kind::kBias:
      if (values_.size() != d_tok) {
        throw DimensionError("bias has length " + std::to_string(values_.size()) + ", token size is " +
                             std::to_string(d_tok));
      }
      break;
    case Kind::kInterpolate:
      if (values_.size() != n_tokens) {
        throw DimensionError("interpolate has " + std::to_string(values_.size()) + " weights, K=" +
                             std::to_string(n_tokens));
      }
      break;
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ContractError("style directive values must be finite");
  }
}

std::string StyleDirective::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kNone:
      return "none";
    case Kind::kForce:
      return "force(" + std::to_string(token_) + ")";
    case Kind::kBias:
      out << "bias(";
      break;
    case Kind::kInterpolate:
      out << "interpolate(";
      break;
  }
  for (std::size_t i = 0; i < values_.size(); ++i) out << (i ? "," : "") << values_[i];
  out << ")";
  return out.str();
}

}  // namespace styletok::model
