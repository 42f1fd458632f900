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

#include "styletok/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>

#include "styletok/error.hpp"

namespace styletok::model {

namespace {

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path.string());
  }
  void u32(std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out_.write(b, 4);
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    u32(static_cast<std::uint32_t>(bits));
    u32(static_cast<std::uint32_t>(bits >> 32));
  }
  void bytes(const std::string& s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }
  void block(const std::string& name, const num::Shape& shape, std::span<const double> values) {
    u32(static_cast<std::uint32_t>(name.size()));
    bytes(name);
    u32(static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) u32(static_cast<std::uint32_t>(d));
    for (double v : values) f32(v);
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open: " + path.string());
  }
  std::uint32_t u32() {
    unsigned char b[4];
    if (!in_.read(reinterpret_cast<char*>(b), 4)) fail("truncated file");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
  }
  double f32() { return std::bit_cast<float>(u32()); }
  double f64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return std::bit_cast<double>(lo | hi << 32);
  }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    if (!in_.read(s.data(), static_cast<std::streamsize>(n))) fail("truncated file");
    return s;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  [[noreturn]] void fail(const std::string& what) const { throw IoError(path_.string() + ": " + what); }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

struct Block {
  num::Shape shape;
  std::vector<double> values;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, bool with_optimizer) {
  const auto& c = model.config;
  Writer w(path);
  w.bytes("STCK");
  w.u32(kCheckpointVersion);
  for (std::size_t v : {c.alphabet, c.n_tokens, c.d_tok, c.d_txt, c.d_enc, c.d_att, c.d_dec, c.r, c.n_mels,
                        c.n_linear_bins, c.prenet1, c.prenet2, c.d_post}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.u32(c.use_postnet ? 1 : 0);
  w.u32(c.gates == GateMode::kIndependent ? 0 : 1);
  w.f64(c.prenet_dropout);
  w.f64(c.silence_threshold);

  const auto& names = model.params.names();
  w.u32(static_cast<std::uint32_t>(with_optimizer ? 3 * names.size() + 1 : names.size()));
  for (const auto& name : names) {
    const auto& t = model.params.get(name);
    w.block(name, t.shape(), t.values());
  }
  if (with_optimizer) {
    for (const auto& name : names) {
      const auto& shape = model.params.get(name).shape();
      w.block("adam.m." + name, shape, model.params.first_moment(name));
      w.block("adam.v." + name, shape, model.params.second_moment(name));
    }
    const double t[] = {static_cast<double>(model.params.step())};
    w.block("adam.t", {1}, t);
  }
  w.finish();
}

Model load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  if (r.bytes(4) != "STCK") r.fail("not a checkpoint (bad magic)");
  const auto version = r.u32();
  if (version != kCheckpointVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  ModelConfig c;
  for (std::size_t* field : {&c.alphabet, &c.n_tokens, &c.d_tok, &c.d_txt, &c.d_enc, &c.d_att, &c.d_dec, &c.r,
                             &c.n_mels, &c.n_linear_bins, &c.prenet1, &c.prenet2, &c.d_post}) {
    *field = r.u32();
  }
  c.use_postnet = r.u32() != 0;
  c.gates = r.u32() == 0 ? GateMode::kIndependent : GateMode::kComplementary;
  c.prenet_dropout = r.f64();
  c.silence_threshold = r.f64();
  try {
    c.validate();
  } catch (const ContractError& e) {
    r.fail(std::string("invalid config: ") + e.what());
  }

  std::map<std::string, Block> blocks;
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.u32());
    Block b;
    const auto ndim = r.u32();
    if (ndim == 0 || ndim > 4) r.fail("block '" + name + "' has " + std::to_string(ndim) + " dims");
    for (std::uint32_t d = 0; d < ndim; ++d) b.shape.push_back(r.u32());
    b.values.resize(num::shape_numel(b.shape));
    for (auto& v : b.values) v = r.f32();
    if (!blocks.emplace(name, std::move(b)).second) r.fail("duplicate block '" + name + "'");
  }
  if (!r.at_end()) r.fail("trailing bytes after the last block");

  num::Rng scratch(0);
  Model model = Model::create(c, scratch, num::StoragePrecision::kFloat32);
  auto take = [&](const std::string& name, const num::Shape& shape) -> Block& {
    auto it = blocks.find(name);
    if (it == blocks.end()) r.fail("missing block '" + name + "'");
    if (it->second.shape != shape) {
      r.fail("block '" + name + "' has shape " + num::shape_str(it->second.shape) + ", config implies " +
             num::shape_str(shape));
    }
    return it->second;
  };
  std::size_t used = 0;
  for (const auto& name : model.params.names()) {
    auto& t = model.params.get(name);
    const auto& b = take(name, t.shape());
    std::copy(b.values.begin(), b.values.end(), t.mutable_values().begin());
    ++used;
  }
  if (blocks.count("adam.t")) {
    const auto step = static_cast<std::uint64_t>(take("adam.t", {1}).values[0]);
    ++used;
    for (const auto& name : model.params.names()) {
      const auto& shape = model.params.get(name).shape();
      auto m = take("adam.m." + name, shape).values;
      auto v = take("adam.v." + name, shape).values;
      model.params.set_optimizer_state(step, name, std::move(m), std::move(v));
      used += 2;
    }
  }
  if (used != blocks.size()) r.fail("unexpected extra blocks");
  model.params.round_to_storage();
  return model;
}

}  // namespace styletok::model
