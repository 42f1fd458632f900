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

#include "styletok/corpus/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "styletok/dsp/wav.hpp"
#include "styletok/error.hpp"

namespace styletok::corpus {

std::vector<StyleClass> default_styles() {
  return {
      {0, "neutral", 1.0, 0.0, false, 1.0},
      {1, "high", 1.4, 0.0, false, 1.0},
      {2, "robotic", 0.85, 0.0, true, 1.0},
      {3, "rising", 1.0, 60.0, false, 1.0},
  };
}

std::vector<double> default_style_weights() { return {0.7, 0.1, 0.1, 0.1}; }

const std::vector<SymbolSpec>& symbol_inventory() {
  static const std::vector<SymbolSpec> inventory = [] {
    std::vector<SymbolSpec> out;
    num::Rng rng(0x51);
    for (std::size_t i = 0; i < kAlphabetSize; ++i) {
      SymbolSpec s;
      s.id = static_cast<int>(i);
      s.base_frames = 6 + (i * 5) % 9;
      s.formant_hz = {rng.uniform(300, 900), rng.uniform(1000, 2600)};
      s.bandwidth_hz = {rng.uniform(60, 120), rng.uniform(90, 180)};
      const double a = rng.uniform(-25, 25), c = rng.uniform(-25, 25);
      s.contour = {a, -(a + c) / 2, c};
      out.push_back(s);
    }
    return out;
  }();
  return inventory;
}

std::vector<int> sample_text(num::Rng& rng, std::size_t min_len, std::size_t max_len) {
  if (min_len < 1 || min_len > max_len || max_len > 30) {
    throw ContractError("sample_text: need 1 <= min_len <= max_len <= 30, got " + std::to_string(min_len) + ", " +
                        std::to_string(max_len));
  }
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::vector<int> out(len);
  for (auto& s : out) s = static_cast<int>(rng.below(kAlphabetSize));
  return out;
}

std::vector<std::size_t> symbol_durations(const std::vector<int>& symbols, const StyleClass& style) {
  if (style.duration_scale <= 0) throw ContractError("style duration_scale must be > 0");
  const auto& inv = symbol_inventory();
  std::vector<std::size_t> out;
  for (int s : symbols) {
    if (s < 0 || static_cast<std::size_t>(s) >= inv.size()) {
      throw IndexError("symbol " + std::to_string(s) + " outside alphabet of " + std::to_string(inv.size()));
    }
    const double d = std::round(static_cast<double>(inv[s].base_frames) * style.duration_scale);
    out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(d)));
  }
  return out;
}

namespace {

struct Resonator {
  double b0 = 0, a1 = 0, a2 = 0;
  Resonator(double hz, double bw, int sr) {
    const double r = std::exp(-std::numbers::pi * bw / sr);
    const double theta = 2 * std::numbers::pi * hz / sr;
    a1 = 2 * r * std::cos(theta);
    a2 = -r * r;
    b0 = (1 - r) * std::sqrt(1 - 2 * r * std::cos(2 * theta) + r * r);
  }
};

// Centred moving average with edge replication; removes the pitch jumps
// between neighbouring symbols.
std::vector<double> glide(const std::vector<double>& x, std::size_t width) {
  const std::size_t half = width / 2;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> prefix(x.size() + 2 * half + 1, 0.0);
  for (std::ptrdiff_t i = 0; i < n + 2 * static_cast<std::ptrdiff_t>(half); ++i) {
    const auto src = std::clamp<std::ptrdiff_t>(i - static_cast<std::ptrdiff_t>(half), 0, n - 1);
    prefix[i + 1] = prefix[i] + x[src];
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (prefix[i + 2 * half + 1] - prefix[i]) / (2 * half + 1);
  return out;
}

}  // namespace

Utterance render_utterance(const std::vector<int>& symbols, const StyleClass& style, num::Rng& rng,
                           const RenderOptions& opts) {
  if (symbols.empty()) throw ContractError("render_utterance: empty symbol sequence");
  if (style.f0_scale <= 0) throw ContractError("style f0_scale must be > 0");
  const auto& audio = opts.audio;
  const auto& inv = symbol_inventory();
  const auto durations = symbol_durations(symbols, style);
  const int sr = audio.sample_rate;
  const std::size_t hop = audio.hop;

  std::size_t voiced_frames = 0;
  for (auto d : durations) voiced_frames += d;
  const std::size_t voiced = voiced_frames * hop;
  const std::size_t total = (voiced_frames + opts.trailing_silence_frames) * hop;

  // Per-sample F0 and owning symbol.
  std::vector<double> f0(voiced);
  std::vector<std::size_t> owner(voiced);
  std::size_t n = 0;
  for (std::size_t j = 0; j < symbols.size(); ++j) {
    const auto& c = inv[symbols[j]].contour;
    const std::size_t len = durations[j] * hop;
    for (std::size_t k = 0; k < len; ++k, ++n) {
      const double u = (k + 0.5) / len;
      const double offset = u < 0.5 ? c[0] + (c[1] - c[0]) * (u / 0.5) : c[1] + (c[2] - c[1]) * ((u - 0.5) / 0.5);
      const double t = static_cast<double>(n) / sr;
      f0[n] = style.f0_scale * (opts.base_f0 + (style.f0_flatten ? 0.0 : offset)) + style.f0_slope * t;
      owner[n] = j;
    }
  }
  f0 = glide(f0, 4 * hop);
  for (double v : f0) {
    if (v < kMinF0 || v > kMaxF0) {
      throw GenerationError("style '" + style.label + "' drives F0 to " + std::to_string(v) + " Hz, outside [80, 380]");
    }
  }

  std::vector<double> x(total, 0.0);
  double phase = rng.uniform(0, 2 * std::numbers::pi);
  double y1a = 0, y2a = 0, y1b = 0, y2b = 0;
  const std::size_t ramp = static_cast<std::size_t>(sr / 100);
  for (std::size_t i = 0; i < voiced; ++i) {
    double src = 0;
    for (int h = 1; h <= 5; ++h) src += std::sin(h * phase) / h;
    phase = std::fmod(phase + 2 * std::numbers::pi * f0[i] / sr, 2 * std::numbers::pi);

    const auto& spec = inv[symbols[owner[i]]];
    const Resonator ra(spec.formant_hz[0], spec.bandwidth_hz[0], sr);
    const Resonator rb(spec.formant_hz[1], spec.bandwidth_hz[1], sr);
    const double ya = ra.b0 * src + ra.a1 * y1a + ra.a2 * y2a;
    y2a = y1a;
    y1a = ya;
    const double yb = rb.b0 * src + rb.a1 * y1b + rb.a2 * y2b;
    y2b = y1b;
    y1b = yb;

    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
    if (voiced - i <= ramp) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * (voiced - 1 - i) / ramp));
    x[i] = (ya + yb) * env;
  }
  double peak = 0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0) {
    for (double& v : x) v *= opts.peak / peak;
  }

  Utterance u;
  u.symbols = symbols;
  u.style_id = style.id;
  u.voiced_frames = voiced_frames;
  // Features come from the 16-bit signal actually written to disk.
  u.waveform = dsp::from_pcm16(dsp::to_pcm16(dsp::Waveform{std::move(x), sr}));
  u.linear = dsp::magnitude(dsp::stft(u.waveform, audio.n_fft, hop));
  u.mel = dsp::apply_mel(u.linear, dsp::mel_filterbank(sr, audio.n_fft, audio.n_mels, audio.fmin, audio.fmax));
  u.ref_f0 = dsp::F0Track{std::vector<double>(u.linear.frames, 0.0), hop, sr};
  for (std::size_t m = 0; m < u.linear.frames; ++m) {
    if (m * hop < voiced) u.ref_f0.hz[m] = f0[m * hop];
  }
  return u;
}

}  // namespace styletok::corpus
