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

namespace styletok::model {

enum class GateMode {
  kIndependent,    // two sigmoid outputs
  kComplementary,  // g_style = 1 - g_text
};

struct ModelConfig {
  std::size_t alphabet = 16;
  std::size_t n_tokens = 10;
  std::size_t d_tok = 64;
  std::size_t d_txt = 64;
  std::size_t d_enc = 128;  // both directions together
  std::size_t d_att = 64;
  std::size_t d_dec = 128;
  std::size_t r = 2;
  std::size_t n_mels = 40;
  std::size_t n_linear_bins = 257;
  std::size_t prenet1 = 64;
  std::size_t prenet2 = 32;
  std::size_t d_post = 64;  // per direction
  bool use_postnet = true;
  GateMode gates = GateMode::kIndependent;
  // Training only.
  double prenet_dropout = 0.0;
  // Mean mel level under which a synthesized frame counts as silence.
  double silence_threshold = 0.05;

  // Throws ContractError on a zero size, odd d_enc/d_post split or
  // out-of-range dropout.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace styletok::model
