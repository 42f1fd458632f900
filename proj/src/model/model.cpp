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

#include "styletok/model/model.hpp"

#include <algorithm>

#include "styletok/error.hpp"

namespace styletok::model {

using num::GruWeights;
using num::KeyRows;

namespace {

struct Weights {
  Tensor embedding;
  GruWeights enc_fwd, enc_bwd;
  Tensor tokens, style_w, style_b;
  Tensor pre_w1, pre_b1, pre_w2, pre_b2;
  GruWeights att_rnn;
  AttentionParams text_att, style_att;
  Tensor proj_text, proj_style;
  Tensor ctrl_w, ctrl_b;
  GruWeights dec_rnn;
  Tensor head_w, head_b;
  GruWeights post_fwd, post_bwd;
  Tensor post_w, post_b;

  static Weights bind(const Model& m) {
    const auto& s = m.params;
    Weights w;
    w.embedding = s.get("text.embedding");
    w.enc_fwd = GruWeights::bind(s, "encoder.fwd");
    w.enc_bwd = GruWeights::bind(s, "encoder.bwd");
    w.tokens = s.get("style.tokens");
    w.style_w = s.get("style.w");
    w.style_b = s.get("style.b");
    w.pre_w1 = s.get("prenet.w1");
    w.pre_b1 = s.get("prenet.b1");
    w.pre_w2 = s.get("prenet.w2");
    w.pre_b2 = s.get("prenet.b2");
    w.att_rnn = GruWeights::bind(s, "att_rnn");
    w.text_att = {s.get("text_att.u"), s.get("text_att.b"), s.get("text_att.v"), s.get("text_att.w")};
    w.style_att = {s.get("style_att.u"), s.get("style_att.b"), s.get("style_att.v"), s.get("style_att.w")};
    w.proj_text = s.get("proj.text");
    w.proj_style = s.get("proj.style");
    w.ctrl_w = s.get("controller.w");
    w.ctrl_b = s.get("controller.b");
    w.dec_rnn = GruWeights::bind(s, "dec_rnn");
    w.head_w = s.get("head.w");
    w.head_b = s.get("head.b");
    if (m.config.use_postnet) {
      w.post_fwd = GruWeights::bind(s, "postnet.fwd");
      w.post_bwd = GruWeights::bind(s, "postnet.bwd");
      w.post_w = s.get("postnet.w");
      w.post_b = s.get("postnet.b");
    }
    return w;
  }
};

Tensor affine(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b) {
  return num::broadcast_add(tape, num::matmul(tape, x, w), b);
}

Tensor bidirectional(Tape& tape, const Tensor& x, std::size_t steps, std::size_t batch,
                     std::span<const std::size_t> lengths, const GruWeights& fwd, const GruWeights& bwd) {
  const Tensor xf = num::gru_project_inputs(tape, x, fwd);
  const Tensor xb = num::gru_project_inputs(tape, x, bwd);
  const std::size_t longest = *std::max_element(lengths.begin(), lengths.end());

  // Padded rows keep the previous state so the reverse pass starts at each
  // item's own end.
  auto masked = [&](const Tensor& next, const Tensor& prev, std::size_t t) {
    if (t < *std::min_element(lengths.begin(), lengths.end())) return next;
    std::vector<double> m(batch);
    for (std::size_t b = 0; b < batch; ++b) m[b] = t < lengths[b] ? 1.0 : 0.0;
    return num::add(tape, prev, num::scale_rows(tape, num::sub(tape, next, prev), Tensor({batch}, std::move(m))));
  };

  std::vector<Tensor> out_f(steps), out_b(steps);
  Tensor h = Tensor::zeros({batch, fwd.hidden_size()});
  for (std::size_t t = 0; t < steps; ++t) {
    if (t >= longest) {
      out_f[t] = h;
      continue;
    }
    h = masked(num::gru_step_projected(tape, num::slice_rows(tape, xf, t * batch, (t + 1) * batch), h, fwd), h, t);
    out_f[t] = h;
  }
  h = Tensor::zeros({batch, bwd.hidden_size()});
  for (std::size_t t = steps; t-- > 0;) {
    if (t >= longest) {
      out_b[t] = h;
      continue;
    }
    h = masked(num::gru_step_projected(tape, num::slice_rows(tape, xb, t * batch, (t + 1) * batch), h, bwd), h, t);
    out_b[t] = h;
  }
  std::vector<Tensor> rows(steps);
  for (std::size_t t = 0; t < steps; ++t) rows[t] = num::concat_cols(tape, {out_f[t], out_b[t]});
  return num::concat_rows(tape, rows);
}

Tensor prenet(Tape& tape, const Weights& w, const Tensor& frame) {
  const Tensor h = num::tanh(tape, affine(tape, frame, w.pre_w1, w.pre_b1));
  return num::tanh(tape, affine(tape, h, w.pre_w2, w.pre_b2));
}

Tensor constant_rows(const std::vector<double>& row, std::size_t batch) {
  std::vector<double> v;
  v.reserve(row.size() * batch);
  for (std::size_t b = 0; b < batch; ++b) v.insert(v.end(), row.begin(), row.end());
  return Tensor({batch, row.size()}, std::move(v));
}

}  // namespace

Model Model::create(const ModelConfig& c, num::Rng& rng, num::StoragePrecision precision) {
  c.validate();
  Model m{c, num::ParamStore(precision)};
  auto& s = m.params;
  s.add_uniform("text.embedding", {c.alphabet, c.d_txt}, rng, 0.5);
  GruWeights::create(s, "encoder.fwd", c.d_txt, c.d_enc / 2, rng);
  GruWeights::create(s, "encoder.bwd", c.d_txt, c.d_enc / 2, rng);
  s.add_uniform("style.tokens", {c.n_tokens, c.d_tok}, rng, 0.5);
  s.add_scaled_uniform("style.w", {c.d_tok, c.d_att}, rng);
  s.add_zeros("style.b", {c.d_att});
  s.add_scaled_uniform("prenet.w1", {c.n_mels, c.prenet1}, rng);
  s.add_zeros("prenet.b1", {c.prenet1});
  s.add_scaled_uniform("prenet.w2", {c.prenet1, c.prenet2}, rng);
  s.add_zeros("prenet.b2", {c.prenet2});
  GruWeights::create(s, "att_rnn", c.prenet2 + c.d_att, c.d_dec, rng);
  for (const char* p : {"text_att", "style_att"}) {
    const std::string prefix = p;
    s.add_scaled_uniform(prefix + ".u", {c.d_dec, c.d_att}, rng);
    s.add_zeros(prefix + ".b", {c.d_att});
    s.add_scaled_uniform(prefix + ".v", {prefix == "text_att" ? c.d_enc : c.d_att, c.d_att}, rng);
    s.add_scaled_uniform(prefix + ".w", {c.d_att}, rng);
  }
  s.add_scaled_uniform("proj.text", {c.d_enc, c.d_att}, rng);
  s.add_scaled_uniform("proj.style", {c.d_att, c.d_att}, rng);
  s.add_scaled_uniform("controller.w", {c.prenet2, c.gates == GateMode::kIndependent ? 2u : 1u}, rng);
  s.add_zeros("controller.b", {c.gates == GateMode::kIndependent ? 2u : 1u});
  GruWeights::create(s, "dec_rnn", c.d_att + c.prenet2, c.d_dec, rng);
  s.add_scaled_uniform("head.w", {c.d_dec, c.r * c.n_mels}, rng);
  s.add_zeros("head.b", {c.r * c.n_mels});
  if (c.use_postnet) {
    GruWeights::create(s, "postnet.fwd", c.n_mels, c.d_post, rng);
    GruWeights::create(s, "postnet.bwd", c.n_mels, c.d_post, rng);
    s.add_scaled_uniform("postnet.w", {2 * c.d_post, c.n_linear_bins}, rng);
    s.add_zeros("postnet.b", {c.n_linear_bins});
  }
  return m;
}

TextBatch TextBatch::pack(const std::vector<std::vector<int>>& texts, std::size_t alphabet) {
  if (texts.empty()) throw ContractError("text batch is empty");
  TextBatch tb;
  tb.batch = texts.size();
  for (const auto& t : texts) {
    if (t.empty()) throw ContractError("empty symbol sequence");
    for (int s : t) {
      if (s < 0 || static_cast<std::size_t>(s) >= alphabet) {
        throw IndexError("symbol id " + std::to_string(s) + " outside alphabet of " + std::to_string(alphabet));
      }
    }
    tb.lengths.push_back(t.size());
    tb.steps = std::max(tb.steps, t.size());
  }
  tb.ids.assign(tb.steps * tb.batch, 0);
  for (std::size_t b = 0; b < tb.batch; ++b)
    for (std::size_t i = 0; i < texts[b].size(); ++i) tb.ids[i * tb.batch + b] = static_cast<std::size_t>(texts[b][i]);
  return tb;
}

Tensor encode_text(Tape& tape, const Model& model, const TextBatch& text) {
  const Weights w = Weights::bind(model);
  const Tensor x = num::embedding_lookup(tape, w.embedding, text.ids);
  return bidirectional(tape, x, text.steps, text.batch, text.lengths, w.enc_fwd, w.enc_bwd);
}

Tensor style_encode(Tape& tape, const Model& model, const StyleDirective& directive) {
  directive.validate(model.config.n_tokens, model.config.d_tok);
  const Weights w = Weights::bind(model);
  Tensor e = w.tokens;
  if (directive.kind() == StyleDirective::Kind::kBias) {
    e = num::broadcast_add(tape, e, Tensor({model.config.d_tok}, directive.values()));
  }
  return num::tanh(tape, affine(tape, e, w.style_w, w.style_b));
}

AttendResult attend(Tape& tape, const AttentionParams& p, const Tensor& query, const Tensor& keys_proj,
                    const Tensor& values, KeyRows rows, std::span<const std::size_t> lengths) {
  if (keys_proj.rows() != values.rows()) {
    throw DimensionError("attend: " + num::shape_str(keys_proj.shape()) + " keys vs " +
                         num::shape_str(values.shape()) + " values");
  }
  const Tensor q = affine(tape, query, p.u, p.b);
  const Tensor e = num::additive_scores(tape, q, keys_proj, p.w, rows);
  const Tensor a = lengths.empty() ? num::softmax(tape, e) : num::masked_softmax(tape, e, lengths);
  return {a, num::weighted_rows(tape, a, values)};
}

Tensor controller(Tape& tape, const Model& model, const Tensor& prenet_out) {
  const Weights w = Weights::bind(model);
  const Tensor g = num::sigmoid(tape, affine(tape, prenet_out, w.ctrl_w, w.ctrl_b));
  if (model.config.gates == GateMode::kIndependent) return g;
  const Tensor ones = Tensor::filled({g.rows(), 1}, 1.0);
  return num::concat_cols(tape, {g, num::sub(tape, ones, g)});
}

DecoderMemory make_memory(Tape& tape, const Model& model, const TextBatch& text, const StyleDirective& directive) {
  const Weights w = Weights::bind(model);
  DecoderMemory m;
  m.batch = text.batch;
  m.text = encode_text(tape, model, text);
  m.text_keys = num::matmul(tape, m.text, w.text_att.v);
  m.text_lengths = text.lengths;
  m.style = style_encode(tape, model, directive);
  m.style_keys = num::matmul(tape, m.style, w.style_att.v);
  return m;
}

DecoderState DecoderState::initial(const ModelConfig& c, std::size_t batch) {
  return {Tensor::zeros({batch, c.d_dec}), Tensor::zeros({batch, c.d_dec}), Tensor::zeros({batch, c.d_att})};
}

StepOutput decoder_step(Tape& tape, const Model& model, const DecoderMemory& memory, DecoderState& state,
                        const Tensor& prev_frame, const StyleDirective& directive, const Tensor* dropout_keep) {
  const auto& c = model.config;
  directive.validate(c.n_tokens, c.d_tok);
  if (prev_frame.rows() != memory.batch || prev_frame.cols() != c.n_mels) {
    throw DimensionError("decoder_step: previous frame " + num::shape_str(prev_frame.shape()) + ", expected [" +
                         std::to_string(memory.batch) + "x" + std::to_string(c.n_mels) + "]");
  }
  const Weights w = Weights::bind(model);
  Tensor p = prenet(tape, w, prev_frame);
  if (dropout_keep != nullptr) p = num::mul(tape, p, *dropout_keep);

  state.h_att = num::gru_step(tape, num::concat_cols(tape, {p, state.context}), state.h_att, w.att_rnn);

  StepTrace tr;
  const auto text = attend(tape, w.text_att, state.h_att, memory.text_keys, memory.text, KeyRows::kPerQuery,
                           memory.text_lengths);
  tr.a_text = text.weights;
  tr.c_text = text.context;

  switch (directive.kind()) {
    case StyleDirective::Kind::kForce: {
      std::vector<double> onehot(c.n_tokens, 0.0);
      onehot[directive.token()] = 1.0;
      tr.a_style = constant_rows(onehot, memory.batch);
      tr.c_style = num::weighted_rows(tape, tr.a_style, memory.style);
      break;
    }
    case StyleDirective::Kind::kInterpolate:
      tr.a_style = constant_rows(directive.values(), memory.batch);
      tr.c_style = num::weighted_rows(tape, tr.a_style, memory.style);
      break;
    default: {
      const auto style = attend(tape, w.style_att, state.h_att, memory.style_keys, memory.style, KeyRows::kShared);
      tr.a_style = style.weights;
      tr.c_style = style.context;
    }
  }

  tr.gates = controller(tape, model, p);
  tr.c_text_proj = num::matmul(tape, tr.c_text, w.proj_text);
  tr.c_style_proj = num::matmul(tape, tr.c_style, w.proj_style);
  tr.combined = num::add(tape, num::scale_rows(tape, tr.c_text_proj, num::slice_cols(tape, tr.gates, 0, 1)),
                         num::scale_rows(tape, tr.c_style_proj, num::slice_cols(tape, tr.gates, 1, 2)));

  state.h_dec = num::gru_step(tape, num::concat_cols(tape, {tr.combined, p}), state.h_dec, w.dec_rnn);
  state.context = tr.combined;
  return {affine(tape, state.h_dec, w.head_w, w.head_b), std::move(tr)};
}

PackedFrames pack_frames(const std::vector<std::vector<double>>& items, std::size_t width, std::size_t frames) {
  const std::size_t batch = items.size();
  PackedFrames out;
  out.frames = frames;
  std::vector<double> values(frames * batch * width, 0.0), mask(values.size(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    if (items[b].size() % width != 0) throw DimensionError("pack_frames: item size is not a multiple of the width");
    const std::size_t len = items[b].size() / width;
    if (len > frames) throw DimensionError("pack_frames: item longer than the padded frame count");
    out.lengths.push_back(len);
    for (std::size_t f = 0; f < len; ++f) {
      std::copy_n(items[b].begin() + f * width, width, values.begin() + (f * batch + b) * width);
      std::fill_n(mask.begin() + (f * batch + b) * width, width, 1.0);
    }
  }
  out.values = Tensor({frames * batch, width}, std::move(values));
  out.mask = Tensor({frames * batch, width}, std::move(mask));
  return out;
}

Tensor postnet(Tape& tape, const Model& model, const Tensor& mel, std::size_t batch,
               std::span<const std::size_t> frame_lengths) {
  if (!model.config.use_postnet) throw ContractError("model has no post-net");
  const Weights w = Weights::bind(model);
  const std::size_t steps = mel.rows() / batch;
  const Tensor h = bidirectional(tape, mel, steps, batch, frame_lengths, w.post_fwd, w.post_bwd);
  return affine(tape, h, w.post_w, w.post_b);
}

ForwardResult forward_teacher_forced(Tape& tape, const Model& model, const std::vector<std::vector<int>>& texts,
                                     const std::vector<std::vector<double>>& mel_targets,
                                     const StyleDirective& directive, num::Rng* dropout_rng) {
  const auto& c = model.config;
  if (texts.size() != mel_targets.size()) throw DimensionError("one mel target per text required");
  std::size_t longest = 0;
  for (const auto& t : mel_targets) {
    if (t.empty()) throw ContractError("forward_teacher_forced: empty target");
    longest = std::max(longest, t.size() / c.n_mels);
  }
  ForwardResult res;
  res.batch = texts.size();
  res.steps = (longest + c.r - 1) / c.r;
  res.frames = res.steps * c.r;
  const auto packed = pack_frames(mel_targets, c.n_mels, res.frames);
  const auto memory = make_memory(tape, model, TextBatch::pack(texts, c.alphabet), directive);
  DecoderState state = DecoderState::initial(c, res.batch);

  const std::size_t B = res.batch;
  const auto target = packed.values.values();
  std::vector<Tensor> frames;
  for (std::size_t t = 0; t < res.steps; ++t) {
    Tensor prev = Tensor::zeros({B, c.n_mels});
    if (t > 0) {
      const std::size_t f = c.r * t - 1;
      prev = Tensor({B, c.n_mels}, std::vector<double>(target.begin() + f * B * c.n_mels,
                                                        target.begin() + (f + 1) * B * c.n_mels));
    }
    Tensor keep;
    if (dropout_rng != nullptr && c.prenet_dropout > 0.0) {
      std::vector<double> k(B * c.prenet2);
      for (auto& v : k) v = dropout_rng->uniform() < c.prenet_dropout ? 0.0 : 1.0 / (1.0 - c.prenet_dropout);
      keep = Tensor({B, c.prenet2}, std::move(k));
    }
    auto out = decoder_step(tape, model, memory, state, prev, directive, keep.defined() ? &keep : nullptr);
    for (std::size_t j = 0; j < c.r; ++j) frames.push_back(num::slice_cols(tape, out.frames, j * c.n_mels, (j + 1) * c.n_mels));
    res.trace.push_back(std::move(out.trace));
  }
  res.mel = num::concat_rows(tape, frames);
  if (c.use_postnet) {
    std::vector<std::size_t> lengths = packed.lengths;
    res.linear = postnet(tape, model, res.mel, B, lengths);
  }
  return res;
}

AttentionTrace extract_trace(const std::vector<StepTrace>& steps, std::size_t item, std::size_t text_len) {
  AttentionTrace tr;
  tr.steps = steps.size();
  tr.text_len = text_len;
  if (steps.empty()) return tr;
  tr.n_tokens = steps.front().a_style.cols();
  for (const auto& s : steps) {
    for (std::size_t i = 0; i < text_len; ++i) tr.text.push_back(s.a_text.at(item, i));
    for (std::size_t k = 0; k < tr.n_tokens; ++k) tr.style.push_back(s.a_style.at(item, k));
    tr.gates.push_back(s.gates.at(item, 0));
    tr.gates.push_back(s.gates.at(item, 1));
  }
  return tr;
}

SynthesisResult synthesize(const Model& model, const std::vector<int>& symbols, const StyleDirective& directive,
                           std::size_t max_steps) {
  if (max_steps < 1) throw ContractError("synthesize: max_steps must be >= 1");
  const auto& c = model.config;
  Tape tape(Tape::Mode::kInference);
  const auto memory = make_memory(tape, model, TextBatch::pack({symbols}, c.alphabet), directive);
  DecoderState state = DecoderState::initial(c, 1);

  SynthesisResult res;
  std::vector<StepTrace> traces;
  Tensor prev = Tensor::zeros({1, c.n_mels});
  std::size_t quiet = 0;
  for (std::size_t t = 0; t < max_steps && quiet < 3; ++t) {
    auto out = decoder_step(tape, model, memory, state, prev, directive);
    const auto v = out.frames.values();
    res.mel.insert(res.mel.end(), v.begin(), v.end());
    prev = Tensor({1, c.n_mels}, std::vector<double>(v.end() - static_cast<std::ptrdiff_t>(c.n_mels), v.end()));
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    quiet = mean < c.silence_threshold ? quiet + 1 : 0;
    traces.push_back(std::move(out.trace));
  }
  res.frames = res.mel.size() / c.n_mels;
  if (c.use_postnet) {
    const std::size_t len[] = {res.frames};
    const Tensor lin = postnet(tape, model, Tensor({res.frames, c.n_mels}, res.mel), 1, len);
    res.linear.assign(lin.values().begin(), lin.values().end());
  }
  res.trace = extract_trace(traces, 0, symbols.size());
  return res;
}

}  // namespace styletok::model
