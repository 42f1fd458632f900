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

#include "styletok/numcore/gru.hpp"

#include "styletok/error.hpp"
#include "styletok/numcore/param_store.hpp"

namespace styletok::num {

GruWeights GruWeights::create(ParamStore& store, const std::string& prefix, std::size_t input,
                              std::size_t hidden, Rng& rng) {
  GruWeights w;
  w.w_x = store.add_scaled_uniform(prefix + ".w_x", {input, 3 * hidden}, rng);
  w.u_zr = store.add_scaled_uniform(prefix + ".u_zr", {hidden, 2 * hidden}, rng);
  w.u_n = store.add_scaled_uniform(prefix + ".u_n", {hidden, hidden}, rng);
  w.bias = store.add_zeros(prefix + ".bias", {3 * hidden});
  return w;
}

GruWeights GruWeights::bind(const ParamStore& store, const std::string& prefix) {
  return {store.get(prefix + ".w_x"), store.get(prefix + ".u_zr"), store.get(prefix + ".u_n"),
          store.get(prefix + ".bias")};
}

Tensor gru_project_inputs(Tape& tape, const Tensor& x, const GruWeights& w) {
  if (x.cols() != w.input_size()) {
    throw DimensionError("gru: input " + shape_str(x.shape()) + " does not match w_x " +
                         shape_str(w.w_x.shape()));
  }
  return broadcast_add(tape, matmul(tape, x, w.w_x), w.bias);
}

Tensor gru_step_projected(Tape& tape, const Tensor& x_proj, const Tensor& h, const GruWeights& w) {
  const std::size_t hidden = w.hidden_size();
  if (h.cols() != hidden || x_proj.cols() != 3 * hidden || x_proj.rows() != h.rows()) {
    throw DimensionError("gru: state " + shape_str(h.shape()) + " / projected input " +
                         shape_str(x_proj.shape()) + " do not match hidden size " +
                         std::to_string(hidden));
  }
  const Tensor zr = sigmoid(tape, add(tape, slice_cols(tape, x_proj, 0, 2 * hidden),
                                      matmul(tape, h, w.u_zr)));
  const Tensor z = slice_cols(tape, zr, 0, hidden);
  const Tensor r = slice_cols(tape, zr, hidden, 2 * hidden);
  const Tensor n = tanh(tape, add(tape, slice_cols(tape, x_proj, 2 * hidden, 3 * hidden),
                                  matmul(tape, mul(tape, r, h), w.u_n)));
  return add(tape, h, mul(tape, z, sub(tape, n, h)));
}

Tensor gru_step(Tape& tape, const Tensor& x, const Tensor& h, const GruWeights& w) {
  return gru_step_projected(tape, gru_project_inputs(tape, x, w), h, w);
}

}  // namespace styletok::num
