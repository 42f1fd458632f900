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

#include "styletok/dsp/griffin_lim.hpp"

#include <cmath>
#include <numbers>

#include "styletok/error.hpp"

namespace styletok::dsp {

namespace {

// DC and Nyquist appear once in the two-sided spectrum, every other bin twice.
double bin_weight(std::size_t b, std::size_t bins) { return (b == 0 || b + 1 == bins) ? 1.0 : 2.0; }

}  // namespace

double spectral_convergence(const Spectrogram& candidate, const Spectrogram& target) {
  if (candidate.frames != target.frames || candidate.bins != target.bins) {
    throw DimensionError("spectral_convergence: spectrogram shapes differ");
  }
  double diff = 0.0, ref = 0.0;
  for (std::size_t f = 0; f < target.frames; ++f) {
    for (std::size_t b = 0; b < target.bins; ++b) {
      const double w = bin_weight(b, target.bins);
      const double d = candidate.at(f, b) - target.at(f, b);
      diff += w * d * d;
      ref += w * target.at(f, b) * target.at(f, b);
    }
  }
  if (ref <= 0.0) throw ContractError("spectral_convergence: target has zero norm");
  return std::sqrt(diff / ref);
}

GriffinLimResult griffin_lim(const Spectrogram& mag, std::size_t iterations, num::Rng& rng,
                             const GriffinLimOptions& opts) {
  if (iterations == 0) throw ContractError("griffin_lim: iterations must be >= 1");
  if (!(opts.momentum >= 0.0 && opts.momentum <= 1.0)) throw ContractError("griffin_lim: momentum must be in [0, 1]");
  double norm = 0.0;
  for (double v : mag.data) {
    if (!std::isfinite(v) || v < 0.0) throw ContractError("griffin_lim: magnitudes must be finite and >= 0");
    norm += v * v;
  }
  if (norm <= 0.0) throw ContractError("griffin_lim: zero-norm magnitude spectrogram");

  const std::size_t n = mag.data.size();
  ComplexSpectrogram estimate{mag.params, mag.frames, mag.bins, std::vector<Complex>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = opts.init == PhaseInit::kRandom ? rng.uniform(-std::numbers::pi, std::numbers::pi) : 0.0;
    estimate.data[i] = std::polar(mag.data[i], phase);
  }
  std::vector<Complex> projected = estimate.data;

  auto evaluate = [&](const ComplexSpectrogram& x_spec, Waveform& wave, ComplexSpectrogram& rebuilt) {
    wave = istft(x_spec);
    rebuilt = stft(wave, mag.params.n_fft, mag.params.hop, mag.params.window);
    return spectral_convergence(magnitude(rebuilt), mag);
  };

  GriffinLimResult result;
  ComplexSpectrogram rebuilt;
  for (std::size_t it = 0; it < iterations; ++it) {
    double c = evaluate(estimate, result.waveform, rebuilt);
    if (it > 0 && c > result.convergence.back()) {
      estimate.data = projected;
      c = evaluate(estimate, result.waveform, rebuilt);
    }
    result.convergence.push_back(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(rebuilt.data[i]);
      const Complex next = a > 0.0 ? rebuilt.data[i] * (mag.data[i] / a) : Complex(mag.data[i], 0.0);
      estimate.data[i] = next + opts.momentum * (next - projected[i]);
      projected[i] = next;
    }
  }
  return result;
}

}  // namespace styletok::dsp
