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
#include <filesystem>
#include <vector>

namespace styletok::corpus {

// Row-major frames x bins matrix stored as "SPG1", u32 frames, u32 bins,
// then float32 values, all little-endian.
struct SpgMatrix {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> data;

  double at(std::size_t f, std::size_t b) const { return data[f * bins + b]; }
};

void write_spg(const std::filesystem::path& path, const SpgMatrix& m);
SpgMatrix read_spg(const std::filesystem::path& path);
// Reads only the header.
std::pair<std::size_t, std::size_t> read_spg_dims(const std::filesystem::path& path);

}  // namespace styletok::corpus
