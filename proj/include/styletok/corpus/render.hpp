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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "styletok/dsp/audio_config.hpp"
#include "styletok/dsp/f0.hpp"
#include "styletok/dsp/mel.hpp"
#include "styletok/dsp/stft.hpp"
#include "styletok/numcore/rng.hpp"

namespace styletok::corpus {

inline constexpr std::size_t kAlphabetSize = 16;
inline constexpr double kBaseF0 = 200.0;
inline constexpr double kMinF0 = 80.0;
inline constexpr double kMaxF0 = 380.0;

struct StyleClass {
  int id = 0;
  std::string label;
  double f0_scale = 1.0;
  double f0_slope = 0.0;  // Hz per second
  bool f0_flatten = false;
  double duration_scale = 1.0;
};

// neutral, high, robotic, rising
std::vector<StyleClass> default_styles();
std::vector<double> default_style_weights();

struct SymbolSpec {
  int id = 0;
  std::size_t base_frames = 0;
  std::array<double, 2> formant_hz{};
  std::array<double, 2> bandwidth_hz{};
  // F0 offsets at the start, middle and end of the symbol; they average to zero
  // over the symbol's duration.
  std::array<double, 3> contour{};
};

const std::vector<SymbolSpec>& symbol_inventory();

std::vector<int> sample_text(num::Rng& rng, std::size_t min_len, std::size_t max_len);

struct RenderOptions {
  dsp::AudioConfig audio;
  double base_f0 = kBaseF0;
  std::size_t trailing_silence_frames = 6;
  double peak = 0.5;
};

struct Utterance {
  std::vector<int> symbols;
  int style_id = 0;
  dsp::Waveform waveform;
  dsp::Spectrogram linear;
  dsp::MelSpectrogram mel;
  dsp::F0Track ref_f0;
  std::size_t voiced_frames = 0;

  std::size_t frames() const { return linear.frames; }
};

std::vector<std::size_t> symbol_durations(const std::vector<int>& symbols, const StyleClass& style);

Utterance render_utterance(const std::vector<int>& symbols, const StyleClass& style, num::Rng& rng,
                           const RenderOptions& opts = {});

}  // namespace styletok::corpus
