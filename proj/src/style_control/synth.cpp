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

#include "styletok/dsp/griffin_lim.hpp"
#include "styletok/dsp/levels.hpp"
#include "styletok/error.hpp"
#include "styletok/style_control/style_control.hpp"

namespace styletok::style {

dsp::Waveform vocode(const std::vector<double>& linear_levels, std::size_t frames, const SynthOptions& opts) {
  const auto& a = opts.audio;
  if (frames == 0 || linear_levels.size() != frames * a.n_bins()) {
    throw DimensionError("vocode: expected " + std::to_string(frames) + " x " + std::to_string(a.n_bins()) +
                         " linear levels");
  }
  dsp::Spectrogram mag;
  mag.params.n_fft = a.n_fft;
  mag.params.hop = a.hop;
  mag.params.sample_rate = a.sample_rate;
  mag.params.signal_length = (frames - 1) * a.hop;
  mag.frames = frames;
  mag.bins = a.n_bins();
  mag.data = dsp::level_to_amplitude(linear_levels, a);
  num::Rng rng(opts.griffin_lim_seed);
  return dsp::griffin_lim(mag, opts.griffin_lim_iterations, rng).waveform;
}

StyledOutput synth_directed(const model::Model& model, const std::vector<int>& symbols,
                            const model::StyleDirective& directive, const SynthOptions& opts) {
  if (opts.waveform && !model.config.use_postnet) {
    throw ContractError("waveform synthesis needs a model with a post-net");
  }
  StyledOutput out;
  out.synthesis = model::synthesize(model, symbols, directive, opts.max_steps);
  if (opts.waveform) out.waveform = vocode(out.synthesis.linear, out.synthesis.frames, opts);
  return out;
}

StyledOutput synth_forced(const model::Model& model, const std::vector<int>& symbols, std::size_t k,
                          const SynthOptions& opts) {
  return synth_directed(model, symbols, model::StyleDirective::force(k), opts);
}

model::StyleDirective bias_directive(const model::Model& model, std::size_t k, double scale) {
  if (!std::isfinite(scale)) throw ContractError("bias scale must be finite");
  const auto& bank = model.params.get("style.tokens");
  if (k >= bank.rows()) {
    throw IndexError("token " + std::to_string(k) + " out of range for " + std::to_string(bank.rows()) + " tokens");
  }
  std::vector<double> offset(bank.cols());
  for (std::size_t c = 0; c < offset.size(); ++c) offset[c] = scale * bank.at(k, c);
  return model::StyleDirective::bias(std::move(offset));
}

StyledOutput synth_biased(const model::Model& model, const std::vector<int>& symbols, std::size_t k, double scale,
                          const SynthOptions& opts) {
  return synth_directed(model, symbols, bias_directive(model, k, scale), opts);
}

StyledOutput synth_interpolated(const model::Model& model, const std::vector<int>& symbols,
                                const std::vector<double>& lambda, const SynthOptions& opts) {
  return synth_directed(model, symbols, model::StyleDirective::interpolate(lambda), opts);
}

}  // namespace styletok::style
