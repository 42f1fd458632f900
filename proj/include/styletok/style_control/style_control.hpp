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
#include <string>
#include <vector>

#include "styletok/corpus/dataset.hpp"
#include "styletok/dsp/audio_config.hpp"
#include "styletok/dsp/f0.hpp"
#include "styletok/dsp/stft.hpp"
#include "styletok/model/model.hpp"

namespace styletok::style {

struct SynthOptions {
  dsp::AudioConfig audio;
  std::size_t max_steps = 150;
  std::size_t griffin_lim_iterations = 50;
  std::uint64_t griffin_lim_seed = 0;
  bool waveform = true;
};

struct StyledOutput {
  model::SynthesisResult synthesis;
  dsp::Waveform waveform;  // empty when not requested
};

// Griffin-Lim on a level-unit linear spectrogram (frames x n_bins).
dsp::Waveform vocode(const std::vector<double>& linear_levels, std::size_t frames, const SynthOptions& opts);

StyledOutput synth_directed(const model::Model& model, const std::vector<int>& symbols,
                            const model::StyleDirective& directive, const SynthOptions& opts = {});
StyledOutput synth_forced(const model::Model& model, const std::vector<int>& symbols, std::size_t k,
                          const SynthOptions& opts = {});
StyledOutput synth_biased(const model::Model& model, const std::vector<int>& symbols, std::size_t k, double scale,
                          const SynthOptions& opts = {});
StyledOutput synth_interpolated(const model::Model& model, const std::vector<int>& symbols,
                                const std::vector<double>& lambda, const SynthOptions& opts = {});

// scale * E[k], computed from the stored token bank.
model::StyleDirective bias_directive(const model::Model& model, std::size_t k, double scale);

struct TextProfile {
  std::size_t text = 0;
  std::size_t voiced = 0;
  double mean_f0 = 0.0;
  double slope = 0.0;
  double f0_std = 0.0;
  bool unvoiced = false;
};

struct TokenProfile {
  std::size_t token = 0;
  std::vector<TextProfile> per_text;
  std::size_t texts = 0;
  std::size_t used = 0;
  // Over texts that produced voiced frames.
  double mean_f0 = 0.0;
  double mean_spread = 0.0;  // std of per-text means
  double f0_std = 0.0;       // mean of per-text smoothed-F0 std
};

struct F0Curve {
  std::size_t token = 0;
  std::size_t text = 0;
  dsp::F0Track track;  // smoothed
};

struct ProfileRun {
  std::vector<TokenProfile> profiles;
  std::vector<F0Curve> curves;
};

struct ProfileOptions {
  SynthOptions synth;
  // 0 profiles by force-attend; otherwise by bias(scale * E[k]).
  double bias_scale = 0.0;
};

ProfileRun token_f0_profile(const model::Model& model, const std::vector<std::vector<int>>& texts,
                            const std::vector<std::size_t>& tokens, const ProfileOptions& opts = {});

// Smoothed F0 of a waveform with the corpus analysis settings.
dsp::F0Track smoothed_f0(const dsp::Waveform& w, const dsp::AudioConfig& audio);

struct PurityReport {
  std::size_t n_styles = 0;
  std::size_t n_tokens = 0;
  std::vector<std::size_t> contingency;  // n_tokens x n_styles
  double purity = 0.0;
  // Share of utterances whose dominant token is the most frequent token of
  // their style. Equals 1 whenever all utterances share one token.
  double majority_agreement = 0.0;
  std::vector<std::size_t> style_token;  // dominant token per style
  std::vector<std::size_t> assignments;  // dominant token per utterance

  std::size_t count(std::size_t token, std::size_t style) const { return contingency[token * n_styles + style]; }
};

// Purity = sum over tokens of the largest style count in that token's
// row, over the utterance count.
PurityReport purity_from_assignments(const std::vector<std::size_t>& tokens, const std::vector<int>& styles,
                                     std::size_t n_tokens, std::size_t n_styles);

struct LabeledExample {
  std::vector<int> symbols;
  std::vector<double> mel;  // level units, frames x n_mels
  int style_id = 0;
};

std::vector<LabeledExample> load_labeled(const std::filesystem::path& dataset_dir, const dsp::AudioConfig& audio);

// Argmax of the time-averaged style attention of each utterance under
// teacher forcing.
std::vector<std::size_t> dominant_tokens(const model::Model& model, const std::vector<LabeledExample>& data,
                                         std::size_t batch_size = 16);

PurityReport token_purity(const model::Model& model, const std::vector<LabeledExample>& data, std::size_t n_styles);
PurityReport token_purity(const model::Model& model, const std::filesystem::path& dataset_dir);

// Tau-a between two score vectors over the same items.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

// Writes <base>.csv (frame,seconds,token,f0_hz; voiced rows only) and
// <base>.svg with one panel per text and one polyline per curve.
void emit_f0_plot(const std::vector<F0Curve>& curves, const std::filesystem::path& base);

// Horizontal scale of the overlay: one frame is this many SVG units wide.
inline constexpr double kOverlayFrameWidth = 4.0;
inline constexpr double kOverlayHeight = 240.0;

// Mel heatmap with g_text dashed on top; step values span r frames each.
void emit_mixing_overlay(const std::vector<double>& mel, std::size_t n_mels, const model::AttentionTrace& trace,
                         std::size_t r, const std::filesystem::path& path);

}  // namespace styletok::style
