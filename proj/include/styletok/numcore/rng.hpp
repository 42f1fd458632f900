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

#include <array>
#include <cstdint>

namespace styletok::num {

// xoshiro256** seeded through splitmix64. All derived quantities (uniform
// doubles, bounded integers, normals) are computed with explicit integer and
// IEEE arithmetic so streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller (no cached spare).
  double normal();

  // Independent child stream keyed by `stream`; does not advance *this.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::array<std::uint64_t, 4> state() const { return s_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t& x);

}  // namespace styletok::num
