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

#include <complex>
#include <span>
#include <vector>

namespace styletok::dsp {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

// In-place iterative radix-2 transform, unnormalized in both directions.
void fft_inplace(std::span<Complex> data, bool inverse);

// One-sided spectrum of a real frame (n/2 + 1 bins).
std::vector<Complex> rfft(std::span<const double> frame);
// Inverse of rfft with 1/n normalization; n is the time-domain length.
std::vector<double> irfft(std::span<const Complex> bins, std::size_t n);

}  // namespace styletok::dsp
