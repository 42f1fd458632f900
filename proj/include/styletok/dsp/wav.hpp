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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "styletok/dsp/stft.hpp"

namespace styletok::dsp {

struct Pcm16 {
  std::vector<std::int16_t> samples;
  int sample_rate = 0;
};

// Mono 16-bit little-endian PCM in a canonical 44-byte RIFF header.
void write_wav(const std::filesystem::path& path, const Pcm16& pcm);
Pcm16 read_wav(const std::filesystem::path& path);

// x -> clamp(round(x * 32768), -32768, 32767); inverse is s / 32768, so
// 16-bit values survive a round trip exactly.
Pcm16 to_pcm16(const Waveform& w);
Waveform from_pcm16(const Pcm16& pcm);

}  // namespace styletok::dsp
