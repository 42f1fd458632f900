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
#include <vector>

#include "styletok/dsp/stft.hpp"
#include "styletok/numcore/rng.hpp"

namespace styletok::dsp {

enum class PhaseInit { kRandom, kZero };

struct GriffinLimResult {
  Waveform waveform;
  // Spectral convergence after each iteration:
  //   C_i = || |STFT(x_i)| - mag || / || mag ||
  // with norms taken over the full two-sided spectrum.
  std::vector<double> convergence;
};

struct GriffinLimOptions {
  PhaseInit init = PhaseInit::kRandom;
  // Extrapolation weight applied to successive magnitude projections. A step
  // whose error rises is redone as a plain projection, so C_i never increases.
  double momentum = 0.99;
};

// Alternating projections between the target magnitudes and the set of
// consistent spectrograms. With iterations == 1 the result is the inverse
// STFT of the magnitudes under the initial phase.
GriffinLimResult griffin_lim(const Spectrogram& mag, std::size_t iterations, num::Rng& rng,
                             const GriffinLimOptions& opts = {});

// Spectral convergence of `candidate` against target magnitudes.
double spectral_convergence(const Spectrogram& candidate, const Spectrogram& target);

}  // namespace styletok::dsp
