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

#include "styletok/dsp/fft.hpp"

#include <cmath>
#include <numbers>

#include "styletok/error.hpp"

namespace styletok::dsp {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw ContractError("fft: length " + std::to_string(n) + " is not a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by recurrence to avoid drift.
      const Complex w(std::cos(angle * static_cast<double>(k)), std::sin(angle * static_cast<double>(k)));
      for (std::size_t i = 0; i < n; i += len) {
        const Complex u = data[i + k];
        const Complex v = data[i + k + half] * w;
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

std::vector<Complex> rfft(std::span<const double> frame) {
  std::vector<Complex> buf(frame.begin(), frame.end());
  fft_inplace(buf, false);
  buf.resize(frame.size() / 2 + 1);
  return buf;
}

std::vector<double> irfft(std::span<const Complex> bins, std::size_t n) {
  if (bins.size() != n / 2 + 1) {
    throw DimensionError("irfft: " + std::to_string(bins.size()) + " bins for length " + std::to_string(n));
  }
  std::vector<Complex> buf(n);
  // DC and Nyquist of a real signal are real; drop any imaginary residue.
  buf[0] = bins[0].real();
  buf[n / 2] = bins[n / 2].real();
  for (std::size_t k = 1; k < n / 2; ++k) {
    buf[k] = bins[k];
    buf[n - k] = std::conj(bins[k]);
  }
  fft_inplace(buf, true);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real() * scale;
  return out;
}

}  // namespace styletok::dsp
