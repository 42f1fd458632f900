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

#include "styletok/dsp/mel.hpp"

#include <cmath>

#include "styletok/error.hpp"

namespace styletok::dsp {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(int sample_rate, std::size_t n_fft, std::size_t n_mels, double fmin, double fmax) {
  if (sample_rate <= 0 || n_mels == 0 || !is_power_of_two(n_fft)) {
    throw ContractError("mel_filterbank: invalid sample rate, n_fft or n_mels");
  }
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw ContractError("mel_filterbank: band [" + std::to_string(fmin) + ", " + std::to_string(fmax) +
                        "] invalid for sample rate " + std::to_string(sample_rate));
  }
  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.bins = n_fft / 2 + 1;
  fb.fmin = fmin;
  fb.fmax = fmax;
  fb.weights.assign(n_mels * fb.bins, 0.0);
  const double mel_lo = hz_to_mel(fmin), mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    fb.centers_hz.push_back(mid);
    for (std::size_t b = 0; b < fb.bins; ++b) {
      const double f = static_cast<double>(b) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      fb.weights[m * fb.bins + b] = w;
    }
  }
  return fb;
}

MelSpectrogram apply_mel(const Spectrogram& lin, const MelFilterbank& fb) {
  if (lin.bins != fb.bins) {
    throw DimensionError("apply_mel: spectrogram has " + std::to_string(lin.bins) + " bins, filterbank " +
                         std::to_string(fb.bins));
  }
  MelSpectrogram out{lin.frames, fb.n_mels, std::vector<double>(lin.frames * fb.n_mels, 0.0)};
  for (std::size_t f = 0; f < lin.frames; ++f) {
    for (std::size_t m = 0; m < fb.n_mels; ++m) {
      double acc = 0.0;
      for (std::size_t b = 0; b < fb.bins; ++b) acc += fb.weights[m * fb.bins + b] * lin.data[f * lin.bins + b];
      out.data[f * fb.n_mels + m] = acc;
    }
  }
  return out;
}

}  // namespace styletok::dsp
