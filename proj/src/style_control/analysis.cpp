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

#include <algorithm>
#include <cmath>
#include <map>

#include "styletok/dsp/levels.hpp"
#include "styletok/error.hpp"
#include "styletok/style_control/style_control.hpp"

namespace styletok::style {

dsp::F0Track smoothed_f0(const dsp::Waveform& w, const dsp::AudioConfig& audio) {
  dsp::F0Options o;
  o.frame_length = audio.f0_frame;
  o.hop = audio.hop;
  o.fmin = audio.f0_min;
  o.fmax = audio.f0_max;
  o.voicing_threshold = audio.voicing_threshold;
  return dsp::smooth_f0(dsp::estimate_f0(w, o), audio.median_width, audio.mean_width);
}

ProfileRun token_f0_profile(const model::Model& model, const std::vector<std::vector<int>>& texts,
                            const std::vector<std::size_t>& tokens, const ProfileOptions& opts) {
  if (texts.empty()) throw ContractError("token_f0_profile: no texts");
  if (!model.config.use_postnet) throw ContractError("token_f0_profile: model has no post-net");
  SynthOptions so = opts.synth;
  so.waveform = true;
  ProfileRun run;
  for (std::size_t k : tokens) {
    if (k >= model.config.n_tokens) throw IndexError("token " + std::to_string(k) + " out of range");
    TokenProfile p;
    p.token = k;
    p.texts = texts.size();
    const auto directive = opts.bias_scale == 0.0 ? model::StyleDirective::force(k)
                                                  : bias_directive(model, k, opts.bias_scale);
    std::vector<double> means, stds;
    for (std::size_t t = 0; t < texts.size(); ++t) {
      const auto out = synth_directed(model, texts[t], directive, so);
      F0Curve curve{k, t, smoothed_f0(out.waveform, so.audio)};
      const auto stats = dsp::voiced_stats(curve.track);
      TextProfile tp{t, stats.voiced, stats.mean, stats.slope, stats.stddev, stats.voiced == 0};
      if (!tp.unvoiced) {
        means.push_back(tp.mean_f0);
        stds.push_back(tp.f0_std);
      }
      p.per_text.push_back(tp);
      run.curves.push_back(std::move(curve));
    }
    p.used = means.size();
    if (p.used > 0) {
      double sum = 0, sq = 0, s = 0;
      for (double m : means) sum += m;
      p.mean_f0 = sum / p.used;
      for (double m : means) sq += (m - p.mean_f0) * (m - p.mean_f0);
      p.mean_spread = std::sqrt(sq / p.used);
      for (double v : stds) s += v;
      p.f0_std = s / p.used;
    }
    run.profiles.push_back(std::move(p));
  }
  return run;
}

PurityReport purity_from_assignments(const std::vector<std::size_t>& tokens, const std::vector<int>& styles,
                                     std::size_t n_tokens, std::size_t n_styles) {
  if (tokens.size() != styles.size()) throw DimensionError("purity: one style per assignment required");
  PurityReport r;
  r.n_tokens = n_tokens;
  r.n_styles = n_styles;
  r.contingency.assign(n_tokens * n_styles, 0);
  r.assignments = tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= n_tokens) throw IndexError("purity: token index out of range");
    if (styles[i] < 0 || static_cast<std::size_t>(styles[i]) >= n_styles) {
      throw IndexError("purity: style id out of range");
    }
    ++r.contingency[tokens[i] * n_styles + static_cast<std::size_t>(styles[i])];
  }
  std::size_t hit = 0;
  for (std::size_t k = 0; k < n_tokens; ++k) {
    std::size_t best = 0;
    for (std::size_t s = 0; s < n_styles; ++s) best = std::max(best, r.count(k, s));
    hit += best;
  }
  r.purity = tokens.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(tokens.size());
  std::size_t hit_style = 0;
  for (std::size_t s = 0; s < n_styles; ++s) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n_tokens; ++k) {
      if (r.count(k, s) > r.count(best, s)) best = k;
    }
    r.style_token.push_back(best);
    hit_style += r.count(best, s);
  }
  r.majority_agreement = tokens.empty() ? 0.0 : static_cast<double>(hit_style) / static_cast<double>(tokens.size());
  return r;
}

std::vector<LabeledExample> load_labeled(const std::filesystem::path& dataset_dir, const dsp::AudioConfig& audio) {
  const auto manifest = corpus::load_manifest(dataset_dir);
  const auto records = corpus::load_training_view(dataset_dir);
  std::map<std::string, const corpus::TrainingRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::vector<LabeledExample> out;
  for (const auto& m : manifest.records) {
    const auto it = by_id.find(m.id);
    if (it == by_id.end()) throw IoError("record " + m.id + " missing from " + dataset_dir.string());
    if (it->second->mel.bins != audio.n_mels) throw DimensionError("record " + m.id + ": mel width mismatch");
    out.push_back({m.symbols, dsp::amplitude_to_level(it->second->mel.data, audio), m.style_id});
  }
  return out;
}

std::vector<std::size_t> dominant_tokens(const model::Model& model, const std::vector<LabeledExample>& data,
                                         std::size_t batch_size) {
  const auto& c = model.config;
  std::vector<std::size_t> out;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    std::vector<std::vector<int>> texts;
    std::vector<std::vector<double>> mels;
    for (std::size_t i = start; i < end; ++i) {
      texts.push_back(data[i].symbols);
      mels.push_back(data[i].mel);
    }
    num::Tape tape(num::Tape::Mode::kInference);
    const auto fwd = model::forward_teacher_forced(tape, model, texts, mels);
    for (std::size_t b = 0; b < texts.size(); ++b) {
      const std::size_t frames = mels[b].size() / c.n_mels;
      const std::size_t steps = (frames + c.r - 1) / c.r;
      std::vector<double> avg(c.n_tokens, 0.0);
      for (std::size_t s = 0; s < steps; ++s) {
        const auto& a = fwd.trace[s].a_style;
        for (std::size_t k = 0; k < c.n_tokens; ++k) avg[k] += a.at(a.rows() == 1 ? 0 : b, k);
      }
      out.push_back(static_cast<std::size_t>(std::max_element(avg.begin(), avg.end()) - avg.begin()));
    }
  }
  return out;
}

PurityReport token_purity(const model::Model& model, const std::vector<LabeledExample>& data, std::size_t n_styles) {
  std::vector<int> styles;
  for (const auto& e : data) styles.push_back(e.style_id);
  return purity_from_assignments(dominant_tokens(model, data), styles, model.config.n_tokens, n_styles);
}

PurityReport token_purity(const model::Model& model, const std::filesystem::path& dataset_dir) {
  dsp::AudioConfig audio;
  audio.n_mels = model.config.n_mels;
  const auto manifest = corpus::load_manifest(dataset_dir);
  return token_purity(model, load_labeled(dataset_dir, audio), manifest.styles.size());
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("kendall_tau: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw ContractError("kendall_tau: need at least two items");
  long score = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double x = a[i] - a[j], y = b[i] - b[j];
      score += (x * y > 0) - (x * y < 0);
    }
  }
  return static_cast<double>(score) / (static_cast<double>(n * (n - 1)) / 2.0);
}

}  // namespace styletok::style
