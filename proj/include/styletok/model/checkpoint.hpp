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

#include <filesystem>

#include "styletok/model/model.hpp"

namespace styletok::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// "STCK", u32 version, the config (u32 sizes and flags, f64 thresholds),
// then named float32 parameter blocks.
// With `with_optimizer` the Adam moments follow as "adam.m.<name>" and
// "adam.v.<name>" blocks plus a one-element "adam.t" block.
void save_checkpoint(const std::filesystem::path& path, const Model& model, bool with_optimizer = false);

// Validates every block name and shape against the stored config. The
// returned model keeps float32 storage.
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace styletok::model
