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

#include "styletok/numcore/ops.hpp"

namespace styletok::num {

class ParamStore;
class Rng;

// Weights of one gated recurrent unit with update gate z, reset gate r and
// candidate n:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   n = tanh(x Wn + (r * h) Un + bn)
//   h' = (1 - z) * h + z * n
// Input weights for the three blocks are packed column-wise as [z | r | n].
struct GruWeights {
  Tensor w_x;   // [in x 3H]
  Tensor u_zr;  // [H x 2H]
  Tensor u_n;   // [H x H]
  Tensor bias;  // [3H]

  std::size_t input_size() const { return w_x.rows(); }
  std::size_t hidden_size() const { return u_n.rows(); }

  // Registers "<prefix>.w_x" etc. with scaled-uniform initialization.
  static GruWeights create(ParamStore& store, const std::string& prefix, std::size_t input,
                           std::size_t hidden, Rng& rng);
  static GruWeights bind(const ParamStore& store, const std::string& prefix);
};

// x: [B x in], h: [B x H] -> [B x H]
Tensor gru_step(Tape& tape, const Tensor& x, const Tensor& h, const GruWeights& w);
// Same cell with the input projection x W_x + bias already computed ([B x 3H]).
Tensor gru_step_projected(Tape& tape, const Tensor& x_proj, const Tensor& h, const GruWeights& w);
// Input projection for a whole sequence at once: [T x in] -> [T x 3H].
Tensor gru_project_inputs(Tape& tape, const Tensor& x, const GruWeights& w);

}  // namespace styletok::num
