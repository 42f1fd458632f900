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

#include "styletok/dsp/fft.hpp"

namespace styletok::dsp {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;
};

enum class WindowKind { kHann, kRectangular };

std::vector<double> make_window(WindowKind kind, std::size_t n);

// Analysis metadata carried by every spectrogram.
struct StftParams {
  std::size_t n_fft = 512;
  std::size_t hop = 128;
  WindowKind window = WindowKind::kHann;
  int sample_rate = 8000;
  // Length of the analysed signal, needed to invert the edge padding.
  std::size_t signal_length = 0;

  bool operator==(const StftParams&) const = default;
};

// Frames x (n_fft/2 + 1) complex bins, row-major.
//
// Frame m is centred on sample m * hop of a signal reflect-padded by n_fft/2
// on both sides, giving 1 + floor(len / hop) frames. Bins are the
// unnormalized DFT of the windowed frame, so Parseval reads
// sum_k |X_k|^2 (two-sided) = n_fft * sum_n |w[n] x[n]|^2.
struct ComplexSpectrogram {
  StftParams params;
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<Complex> data;

  Complex& at(std::size_t f, std::size_t b) { return data[f * bins + b]; }
  const Complex& at(std::size_t f, std::size_t b) const { return data[f * bins + b]; }
};

// Non-negative magnitudes with the same layout.
struct Spectrogram {
  StftParams params;
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> data;

  double& at(std::size_t f, std::size_t b) { return data[f * bins + b]; }
  double at(std::size_t f, std::size_t b) const { return data[f * bins + b]; }
};

std::size_t stft_frame_count(std::size_t signal_length, std::size_t hop);

ComplexSpectrogram stft(const Waveform& w, std::size_t n_fft, std::size_t hop,
                        WindowKind window = WindowKind::kHann);
Spectrogram magnitude(const ComplexSpectrogram& spec);

// Least-squares inverse: the waveform whose STFT is closest (two-sided
// Frobenius norm) to `spec`. Exact for consistent spectrograms.
Waveform istft(const ComplexSpectrogram& spec);

}  // namespace styletok::dsp
