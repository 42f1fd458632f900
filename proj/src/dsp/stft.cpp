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

#include "styletok/dsp/stft.hpp"

#include <cmath>
#include <numbers>

#include "styletok/error.hpp"

namespace styletok::dsp {

std::vector<double> make_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::kHann) {
    // Periodic Hann.
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return w;
}

std::size_t stft_frame_count(std::size_t signal_length, std::size_t hop) {
  return 1 + signal_length / hop;
}

namespace {

void check_params(std::size_t n_fft, std::size_t hop) {
  if (!is_power_of_two(n_fft)) throw ContractError("stft: n_fft " + std::to_string(n_fft) + " is not a power of two");
  if (hop == 0 || hop > n_fft) throw ContractError("stft: hop must be in [1, n_fft]");
}

// Index into the unpadded signal for padded position j (numpy "reflect").
std::size_t reflect_index(std::ptrdiff_t j, std::size_t pad, std::size_t len) {
  std::ptrdiff_t i = j - static_cast<std::ptrdiff_t>(pad);
  const auto n = static_cast<std::ptrdiff_t>(len);
  if (i < 0) i = -i;
  if (i >= n) i = 2 * (n - 1) - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

ComplexSpectrogram stft(const Waveform& w, std::size_t n_fft, std::size_t hop, WindowKind window) {
  check_params(n_fft, hop);
  const std::size_t len = w.samples.size();
  if (len < n_fft) {
    throw ContractError("stft: signal of " + std::to_string(len) + " samples is shorter than one window (" +
                        std::to_string(n_fft) + ")");
  }
  const std::size_t pad = n_fft / 2;
  const auto win = make_window(window, n_fft);
  ComplexSpectrogram out;
  out.params = {n_fft, hop, window, w.sample_rate, len};
  out.frames = stft_frame_count(len, hop);
  out.bins = n_fft / 2 + 1;
  out.data.resize(out.frames * out.bins);
  std::vector<double> frame(n_fft);
  for (std::size_t m = 0; m < out.frames; ++m) {
    for (std::size_t n = 0; n < n_fft; ++n) {
      const auto j = static_cast<std::ptrdiff_t>(m * hop + n);
      frame[n] = win[n] * w.samples[reflect_index(j, pad, len)];
    }
    const auto bins = rfft(frame);
    std::copy(bins.begin(), bins.end(), out.data.begin() + static_cast<std::ptrdiff_t>(m * out.bins));
  }
  return out;
}

Spectrogram magnitude(const ComplexSpectrogram& spec) {
  Spectrogram out{spec.params, spec.frames, spec.bins, std::vector<double>(spec.data.size())};
  for (std::size_t i = 0; i < spec.data.size(); ++i) out.data[i] = std::abs(spec.data[i]);
  return out;
}

Waveform istft(const ComplexSpectrogram& spec) {
  const auto& p = spec.params;
  check_params(p.n_fft, p.hop);
  if (spec.bins != p.n_fft / 2 + 1 || spec.data.size() != spec.frames * spec.bins) {
    throw ContractError("istft: spectrogram layout does not match n_fft " + std::to_string(p.n_fft));
  }
  if (p.signal_length < p.n_fft || spec.frames != stft_frame_count(p.signal_length, p.hop)) {
    throw ContractError("istft: " + std::to_string(spec.frames) + " frames inconsistent with signal length " +
                        std::to_string(p.signal_length));
  }
  const std::size_t pad = p.n_fft / 2;
  const std::size_t len = p.signal_length;
  const std::size_t padded_len = len + 2 * pad;
  const auto win = make_window(p.window, p.n_fft);
  std::vector<double> num(padded_len, 0.0), den(padded_len, 0.0);
  for (std::size_t m = 0; m < spec.frames; ++m) {
    const auto frame = irfft(std::span<const Complex>(spec.data).subspan(m * spec.bins, spec.bins), p.n_fft);
    for (std::size_t n = 0; n < p.n_fft; ++n) {
      num[m * p.hop + n] += win[n] * frame[n];
      den[m * p.hop + n] += win[n] * win[n];
    }
  }
  // Every padded sample is a copy of one interior sample, so the normal
  // equations stay diagonal after folding the pads back onto their sources.
  Waveform out{std::vector<double>(len, 0.0), p.sample_rate};
  std::vector<double> fold_num(len, 0.0), fold_den(len, 0.0);
  for (std::size_t j = 0; j < padded_len; ++j) {
    const std::size_t i = reflect_index(static_cast<std::ptrdiff_t>(j), pad, len);
    fold_num[i] += num[j];
    fold_den[i] += den[j];
  }
  for (std::size_t i = 0; i < len; ++i) out.samples[i] = fold_den[i] > 0.0 ? fold_num[i] / fold_den[i] : 0.0;
  return out;
}

}  // namespace styletok::dsp
