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

#include "styletok/corpus/spg.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <tuple>

#include "styletok/error.hpp"

namespace styletok::corpus {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'G', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::pair<std::size_t, std::size_t> read_header(std::istream& in, const std::filesystem::path& path) {
  unsigned char head[12];
  if (!in.read(reinterpret_cast<char*>(head), sizeof head)) throw IoError("truncated SPG1 header: " + path.string());
  for (std::size_t i = 0; i < 4; ++i) {
    if (static_cast<char>(head[i]) != kMagic[i]) throw IoError("bad SPG1 magic: " + path.string());
  }
  return {get_u32(head + 4), get_u32(head + 8)};
}

}  // namespace

void write_spg(const std::filesystem::path& path, const SpgMatrix& m) {
  if (m.data.size() != m.frames * m.bins) throw DimensionError("write_spg: data size does not match dims");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(m.frames));
  put_u32(out, static_cast<std::uint32_t>(m.bins));
  for (double v : m.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<std::size_t, std::size_t> read_spg_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return read_header(in, path);
}

SpgMatrix read_spg(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  SpgMatrix m;
  std::tie(m.frames, m.bins) = read_header(in, path);
  std::vector<unsigned char> raw(m.frames * m.bins * 4);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw IoError("truncated SPG1 payload: " + path.string());
  }
  m.data.resize(m.frames * m.bins);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = std::bit_cast<float>(get_u32(raw.data() + 4 * i));
  return m;
}

}  // namespace styletok::corpus
