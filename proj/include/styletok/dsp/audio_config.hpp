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

namespace styletok::dsp {

// Analysis parameters shared by the corpus, the model targets and the
// vocoding path.
struct AudioConfig {
  int sample_rate = 8000;
  std::size_t n_fft = 512;
  std::size_t hop = 128;
  std::size_t n_mels = 40;
  double fmin = 50.0;
  double fmax = 4000.0;

  // F0 analysis.
  std::size_t f0_frame = 512;
  double f0_min = 60.0;
  double f0_max = 400.0;
  double voicing_threshold = 0.3;
  std::size_t median_width = 5;
  std::size_t mean_width = 9;

  // Level compression for model features: dB clipped to
  // [ref_db + min_db, ref_db] and mapped linearly onto [0, 1].
  double ref_db = 40.0;
  double min_db = -100.0;

  std::size_t n_bins() const { return n_fft / 2 + 1; }
  double frame_seconds() const { return static_cast<double>(hop) / sample_rate; }
};

}  // namespace styletok::dsp
