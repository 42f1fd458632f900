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

// Per-frame fundamental frequency in Hz; 0.0 marks an unvoiced frame.
// Frame m is centred on sample m * hop, matching the STFT frame grid.
struct F0Track {
  std::vector<double> hz;
  std::size_t hop = 0;
  int sample_rate = 0;

  double frame_seconds() const { return static_cast<double>(hop) / sample_rate; }
};

struct F0Options {
  std::size_t frame_length = 512;
  std::size_t hop = 128;
  double fmin = 60.0;
  double fmax = 400.0;
  double voicing_threshold = 0.3;
  // Frames quieter than this RMS are unvoiced regardless of periodicity.
  double min_rms = 1e-4;
};

// Normalized autocorrelation pitch tracker with parabolic peak refinement.
F0Track estimate_f0(const Waveform& w, const F0Options& opts);

// Median then moving-average filtering inside each voiced run; unvoiced
// frames stay 0.0. Windows are edge-replicated within the run.
F0Track smooth_f0(const F0Track& track, std::size_t median_width, std::size_t mean_width);

// Sum of absolute frame-to-frame differences inside voiced runs.
double voiced_total_variation(const F0Track& track);

struct VoicedStats {
  std::size_t voiced = 0;
  double mean = 0.0;
  double stddev = 0.0;
  // Least-squares slope of F0 against time, Hz per second.
  double slope = 0.0;
};

VoicedStats voiced_stats(const F0Track& track);

}  // namespace styletok::dsp
