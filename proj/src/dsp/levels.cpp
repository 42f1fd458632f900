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

#include "styletok/dsp/levels.hpp"

#include <algorithm>
#include <cmath>

namespace styletok::dsp {

std::vector<double> amplitude_to_level(std::span<const double> amplitude, const AudioConfig& cfg) {
  const double floor = std::pow(10.0, (cfg.ref_db + cfg.min_db) / 20.0);
  std::vector<double> out(amplitude.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double db = 20.0 * std::log10(std::max(amplitude[i], floor));
    out[i] = std::clamp((db - cfg.ref_db - cfg.min_db) / -cfg.min_db, 0.0, 1.0);
  }
  return out;
}

std::vector<double> level_to_amplitude(std::span<const double> level, const AudioConfig& cfg) {
  std::vector<double> out(level.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double db = std::clamp(level[i], 0.0, 1.0) * -cfg.min_db + cfg.min_db + cfg.ref_db;
    out[i] = std::pow(10.0, db / 20.0);
  }
  return out;
}

}  // namespace styletok::dsp
