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

#include <span>
#include <vector>

#include "styletok/dsp/audio_config.hpp"

namespace styletok::dsp {

// Magnitude -> [0, 1] feature: (20 log10(max(a, floor)) - ref_db - min_db) / -min_db, clipped.
std::vector<double> amplitude_to_level(std::span<const double> amplitude, const AudioConfig& cfg);
// Inverse of amplitude_to_level on [0, 1]; inputs are clipped first.
std::vector<double> level_to_amplitude(std::span<const double> level, const AudioConfig& cfg);

}  // namespace styletok::dsp
