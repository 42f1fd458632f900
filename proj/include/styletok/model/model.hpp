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
#include <vector>

#include "styletok/model/config.hpp"
#include "styletok/model/directive.hpp"
#include "styletok/numcore/gru.hpp"
#include "styletok/numcore/ops.hpp"
#include "styletok/numcore/param_store.hpp"
#include "styletok/numcore/rng.hpp"

namespace styletok::model {

using num::Tape;
using num::Tensor;

struct Model {
  ModelConfig config;
  num::ParamStore params;

  static Model create(const ModelConfig& config, num::Rng& rng,
                      num::StoragePrecision precision = num::StoragePrecision::kFloat64);
};

// Sequences are laid out time-major: row t * batch + b holds step t of item b.
struct TextBatch {
  std::vector<std::size_t> ids;  // padded with 0
  std::vector<std::size_t> lengths;
  std::size_t steps = 0;
  std::size_t batch = 0;

  static TextBatch pack(const std::vector<std::vector<int>>& texts, std::size_t alphabet);
};

// H: [T*B x d_enc]
Tensor encode_text(Tape& tape, const Model& model, const TextBatch& text);

// S: [K x d_att]
Tensor style_encode(Tape& tape, const Model& model, const StyleDirective& directive);

struct AttentionParams {
  Tensor u;  // [query x d_att]
  Tensor b;  // [d_att]
  Tensor v;  // [key x d_att]
  Tensor w;  // [d_att]
};

struct AttendResult {
  Tensor weights;  // [B x N]
  Tensor context;  // [B x value width]
};

// keys_proj = keys * v. Per-query keys and values use the time-major layout;
// `lengths` (one per batch row, empty for none) masks padded positions.
AttendResult attend(Tape& tape, const AttentionParams& p, const Tensor& query, const Tensor& keys_proj,
                    const Tensor& values, num::KeyRows rows, std::span<const std::size_t> lengths = {});

// [B x 2] gates: column 0 weights the text context, column 1 the style context.
Tensor controller(Tape& tape, const Model& model, const Tensor& prenet_out);

struct DecoderMemory {
  Tensor text;        // H
  Tensor text_keys;   // H * V_text
  std::vector<std::size_t> text_lengths;
  Tensor style;       // S
  Tensor style_keys;  // S * V_style
  std::size_t batch = 0;
};

DecoderMemory make_memory(Tape& tape, const Model& model, const TextBatch& text, const StyleDirective& directive);

struct DecoderState {
  Tensor h_att;
  Tensor h_dec;
  Tensor context;  // combined context of the previous step

  static DecoderState initial(const ModelConfig& config, std::size_t batch);
};

struct StepTrace {
  Tensor a_text;   // [B x T]
  Tensor a_style;  // [B x K]
  Tensor gates;    // [B x 2]
  Tensor c_text;
  Tensor c_style;
  Tensor c_text_proj;
  Tensor c_style_proj;
  Tensor combined;
};

struct StepOutput {
  Tensor frames;  // [B x r*n_mels]
  StepTrace trace;
};

// `dropout_keep` is an optional constant [B x prenet2] mask applied to the
// pre-net output (already scaled by 1/keep).
StepOutput decoder_step(Tape& tape, const Model& model, const DecoderMemory& memory, DecoderState& state,
                        const Tensor& prev_frame, const StyleDirective& directive,
                        const Tensor* dropout_keep = nullptr);

// Frame-major stack of per-item matrices, padded to `frames` rows each.
struct PackedFrames {
  Tensor values;  // [frames*B x width]
  Tensor mask;    // same shape, 1 on real frames
  std::vector<std::size_t> lengths;
  std::size_t frames = 0;
};

PackedFrames pack_frames(const std::vector<std::vector<double>>& items, std::size_t width, std::size_t frames);

struct ForwardResult {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::size_t frames = 0;  // steps * r
  Tensor mel;              // [frames*B x n_mels]
  Tensor linear;           // [frames*B x n_linear_bins], undefined without post-net
  std::vector<StepTrace> trace;
};

// targets[b] holds frames_b x n_mels values. The frame count is padded up to
// a multiple of r.
ForwardResult forward_teacher_forced(Tape& tape, const Model& model, const std::vector<std::vector<int>>& texts,
                                     const std::vector<std::vector<double>>& mel_targets,
                                     const StyleDirective& directive = StyleDirective::none(),
                                     num::Rng* dropout_rng = nullptr);

// Post-net over a predicted mel sequence; frame_lengths masks padding.
Tensor postnet(Tape& tape, const Model& model, const Tensor& mel, std::size_t batch,
               std::span<const std::size_t> frame_lengths);

// Per-utterance attention record.
struct AttentionTrace {
  std::size_t steps = 0;
  std::size_t text_len = 0;
  std::size_t n_tokens = 0;
  std::vector<double> text;   // steps x text_len
  std::vector<double> style;  // steps x n_tokens
  std::vector<double> gates;  // steps x 2

  double text_at(std::size_t s, std::size_t i) const { return text[s * text_len + i]; }
  double style_at(std::size_t s, std::size_t k) const { return style[s * n_tokens + k]; }
  double gate_at(std::size_t s, std::size_t g) const { return gates[s * 2 + g]; }
};

AttentionTrace extract_trace(const std::vector<StepTrace>& steps, std::size_t item, std::size_t text_len);

struct SynthesisResult {
  std::size_t frames = 0;
  std::vector<double> mel;     // frames x n_mels, level units
  std::vector<double> linear;  // frames x n_linear_bins, empty without post-net
  AttentionTrace trace;
};

SynthesisResult synthesize(const Model& model, const std::vector<int>& symbols, const StyleDirective& directive,
                           std::size_t max_steps);

}  // namespace styletok::model
