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

namespace styletok::dsp {

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_mels x bins triangular filters with peaks equally spaced on the mel scale
// between fmin and fmax. Peak weight is 1.
struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t bins = 0;
  double fmin = 0.0;
  double fmax = 0.0;
  std::vector<double> weights;
  std::vector<double> centers_hz;

  double at(std::size_t m, std::size_t b) const { return weights[m * bins + b]; }
};

MelFilterbank mel_filterbank(int sample_rate, std::size_t n_fft, std::size_t n_mels, double fmin, double fmax);

// frames x n_mels, row-major.
struct MelSpectrogram {
  std::size_t frames = 0;
  std::size_t n_mels = 0;
  std::vector<double> data;

  double at(std::size_t f, std::size_t m) const { return data[f * n_mels + m]; }
};

MelSpectrogram apply_mel(const Spectrogram& lin, const MelFilterbank& fb);

}  // namespace styletok::dsp
