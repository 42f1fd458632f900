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

// Runs the nine acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "../unit/gradcheck.hpp"
#include "styletok/cli/run.hpp"
#include "styletok/corpus/dataset.hpp"
#include "styletok/dsp/f0.hpp"
#include "styletok/dsp/griffin_lim.hpp"
#include "styletok/dsp/levels.hpp"
#include "styletok/dsp/stft.hpp"
#include "styletok/model/checkpoint.hpp"
#include "styletok/model/model.hpp"
#include "styletok/numcore/gru.hpp"
#include "styletok/numcore/param_store.hpp"
#include "styletok/style_control/style_control.hpp"
#include "styletok/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace styletok;
using num::Tape;
using num::Tensor;
using testing::grad_check;
using testing::project;
using testing::random_tensor;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lists files that differ between two directory trees; empty when identical.
std::vector<std::string> tree_diff(const fs::path& a, const fs::path& b) {
  std::set<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a)) fa.insert(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b)) fb.insert(fs::relative(e.path(), b));
  std::vector<std::string> out;
  for (const auto& f : fa) {
    if (!fb.count(f)) out.push_back(f.string() + " (only in first)");
    else if (fs::is_regular_file(a / f) && slurp(a / f) != slurp(b / f)) out.push_back(f.string());
  }
  for (const auto& f : fb)
    if (!fa.count(f)) out.push_back(f.string() + " (only in second)");
  return out;
}

model::ModelConfig tiny_config() {
  model::ModelConfig c;
  c.n_tokens = 3;
  c.d_tok = c.d_txt = c.d_enc = c.d_att = c.d_dec = 8;
  c.n_mels = 8;
  c.n_linear_bins = 8;
  c.prenet1 = c.prenet2 = 8;
  c.d_post = 4;
  return c;
}

// ---------------------------------------------------------------- 1

Outcome gradient_suite() {
  double worst_op = 0.0, worst_model = 0.0;
  std::string worst_name;
  std::size_t checks = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    num::Rng rng(5000 + seed);
    const std::size_t r = 1 + rng.below(4), c = 1 + rng.below(5), k = 1 + rng.below(4);
    Tensor a = random_tensor(rng, {r, c});
    Tensor b = random_tensor(rng, {r, c});
    Tensor m = random_tensor(rng, {c, k});
    Tensor v = random_tensor(rng, {c});
    Tensor s = random_tensor(rng, {r, 1});
    Tensor w = random_tensor(rng, {c});
    Tensor keys = random_tensor(rng, {k * r, c});
    Tensor shared = random_tensor(rng, {k, c});
    Tensor alpha = random_tensor(rng, {r, k});
    Tensor table = random_tensor(rng, {5, c});
    const Tensor target = random_tensor(rng, {r, c}, -1.0, 1.0, false);
    Tensor mask({r, c}, std::vector<double>(r * c, 1.0));
    mask.mutable_values()[0] = 0.0;
    std::vector<std::size_t> lens(r), ids(r + 2);
    for (auto& l : lens) l = 1 + rng.below(c);
    for (auto& i : ids) i = rng.below(5);

    num::ParamStore store;
    const auto gru = num::GruWeights::create(store, "gru", c, k, rng);
    Tensor h = random_tensor(rng, {r, k});

    const std::vector<std::pair<const char*, testing::LossFn>> cases = {
        {"matmul", [&](Tape& t) { return project(t, num::matmul(t, a, m), seed); }},
        {"add", [&](Tape& t) { return project(t, num::add(t, a, b), seed); }},
        {"sub", [&](Tape& t) { return project(t, num::sub(t, a, b), seed); }},
        {"mul", [&](Tape& t) { return project(t, num::mul(t, a, b), seed); }},
        {"scale", [&](Tape& t) { return project(t, num::scale(t, a, -1.7), seed); }},
        {"broadcast_add", [&](Tape& t) { return project(t, num::broadcast_add(t, a, v), seed); }},
        {"scale_rows", [&](Tape& t) { return project(t, num::scale_rows(t, a, s), seed); }},
        {"sigmoid", [&](Tape& t) { return project(t, num::sigmoid(t, a), seed); }},
        {"tanh", [&](Tape& t) { return project(t, num::tanh(t, a), seed); }},
        {"softmax", [&](Tape& t) { return project(t, num::softmax(t, a), seed); }},
        {"masked_softmax", [&](Tape& t) { return project(t, num::masked_softmax(t, a, lens), seed); }},
        {"concat_cols", [&](Tape& t) { return project(t, num::concat_cols(t, {a, b, s}), seed); }},
        {"concat_rows", [&](Tape& t) { return project(t, num::concat_rows(t, {a, b}), seed); }},
        {"slice_rows", [&](Tape& t) { return project(t, num::slice_rows(t, a, 0, r), seed); }},
        {"slice_cols", [&](Tape& t) { return project(t, num::slice_cols(t, a, c - 1, c), seed); }},
        {"embedding_lookup", [&](Tape& t) { return project(t, num::embedding_lookup(t, table, ids), seed); }},
        {"sum", [&](Tape& t) { return num::scale(t, num::sum(t, num::mul(t, a, b)), 0.3); }},
        {"l1_loss", [&](Tape& t) { return num::l1_loss(t, a, target, mask); }},
        {"additive_scores",
         [&](Tape& t) { return project(t, num::additive_scores(t, a, keys, w, num::KeyRows::kPerQuery), seed); }},
        {"additive_scores_shared",
         [&](Tape& t) { return project(t, num::additive_scores(t, a, shared, w, num::KeyRows::kShared), seed); }},
        {"weighted_rows", [&](Tape& t) { return project(t, num::weighted_rows(t, alpha, keys), seed); }},
        {"weighted_rows_shared", [&](Tape& t) { return project(t, num::weighted_rows(t, alpha, shared), seed); }},
        {"gru_step", [&](Tape& t) { return project(t, num::gru_step(t, a, h, gru), seed); }},
    };
    std::vector<Tensor> params = {a, b, m, v, s, w, keys, shared, alpha, table, h};
    for (const auto& name : store.names()) params.push_back(store.get(name));
    for (const auto& [name, fn] : cases) {
      const auto res = grad_check(fn, params);
      checks += res.checked;
      if (res.max_rel_error > worst_op) {
        worst_op = res.max_rel_error;
        worst_name = name;
      }
    }
  }

  for (auto gates : {model::GateMode::kIndependent, model::GateMode::kComplementary}) {
    for (const auto& directive : {model::StyleDirective::none(), model::StyleDirective::force(1)}) {
      auto config = tiny_config();
      config.gates = gates;
      num::Rng rng(77);
      const auto m = model::Model::create(config, rng);
      const std::vector<std::vector<int>> texts = {{1, 5, 9, 2, 7}, {3, 3, 8}};
      std::vector<std::vector<double>> targets;
      for (std::size_t frames : {7u, 4u}) {
        std::vector<double> f(frames * config.n_mels);
        for (auto& x : f) x = rng.uniform(0, 1);
        targets.push_back(std::move(f));
      }
      std::vector<Tensor> params;
      for (const auto& name : m.params.names()) params.push_back(m.params.get(name));
      auto loss = [&](Tape& tape) {
        const auto res = model::forward_teacher_forced(tape, m, texts, targets, directive);
        return num::add(tape, project(tape, res.mel, 1), project(tape, res.linear, 2));
      };
      const auto res = grad_check(loss, params);
      checks += res.checked;
      worst_model = std::max(worst_model, res.max_rel_error);
    }
  }
  const bool pass = worst_op <= 1e-4 && worst_model <= 1e-3;
  return {pass, "ops max rel err " + fmt("%.2e", worst_op) + " (" + worst_name + ", limit 1e-4), full model " +
                    fmt("%.2e", worst_model) + " (limit 1e-3), " + std::to_string(checks) + " entries"};
}

// ---------------------------------------------------------------- 2

Outcome attention_invariants() {
  std::size_t steps = 0, rows = 0, gates_seen = 0, bad = 0;
  double worst_sum = 0.0, min_entry = 1.0, g_lo = 1.0, g_hi = 0.0;
  for (std::uint64_t trial = 0; steps < 1000; ++trial) {
    num::Rng rng(9000 + trial);
    auto config = tiny_config();
    config.n_tokens = 1 + rng.below(6);
    config.gates = trial % 2 ? model::GateMode::kComplementary : model::GateMode::kIndependent;
    auto m = model::Model::create(config, rng);
    // Push the scores around so softmax sees both flat and peaked inputs.
    for (const char* name : {"text_att.w", "style_att.w", "controller.w"}) {
      for (auto& x : m.params.get(name).mutable_values()) x *= 1.0 + 10.0 * rng.uniform(0, 1);
    }
    const std::size_t batch = 1 + rng.below(3);
    std::vector<std::vector<int>> texts(batch);
    for (auto& t : texts) {
      t.resize(1 + rng.below(9));
      for (auto& s : t) s = static_cast<int>(rng.below(16));
    }
    Tape tape(Tape::Mode::kInference);
    const auto packed = model::TextBatch::pack(texts, config.alphabet);
    const auto memory = model::make_memory(tape, m, packed, model::StyleDirective::none());
    auto state = model::DecoderState::initial(config, batch);
    Tensor prev = Tensor::zeros({batch, config.n_mels});
    for (int s = 0; s < 25 && steps < 1000; ++s, ++steps) {
      const auto out = model::decoder_step(tape, m, memory, state, prev, model::StyleDirective::none());
      const auto& tr = out.trace;
      for (std::size_t b = 0; b < batch; ++b) {
        double st = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < tr.a_text.cols(); ++i) {
          const double v = tr.a_text.at(b, i);
          min_entry = std::min(min_entry, v);
          if (i >= texts[b].size() && v != 0.0) ++bad;
          st += v;
        }
        for (std::size_t k = 0; k < tr.a_style.cols(); ++k) {
          min_entry = std::min(min_entry, tr.a_style.at(b, k));
          ss += tr.a_style.at(b, k);
        }
        worst_sum = std::max({worst_sum, std::abs(st - 1.0), std::abs(ss - 1.0)});
        rows += 2;
        for (std::size_t g = 0; g < 2; ++g) {
          const double v = tr.gates.at(b, g);
          g_lo = std::min(g_lo, v);
          g_hi = std::max(g_hi, v);
          ++gates_seen;
        }
      }
      // Random previous frames stand in for teacher forcing.
      std::vector<double> f(batch * config.n_mels);
      for (auto& x : f) x = rng.uniform(-2, 2);
      prev = Tensor({batch, config.n_mels}, std::move(f));
    }
  }
  const bool pass = worst_sum <= 1e-6 && min_entry >= 0.0 && bad == 0 && g_lo > 0.0 && g_hi < 1.0;
  return {pass, std::to_string(steps) + " steps, " + std::to_string(rows) + " attention rows: max |sum-1| " +
                    fmt("%.1e", worst_sum) + ", min entry " + fmt("%.2e", min_entry) + ", padded mass " +
                    std::to_string(bad) + "; " + std::to_string(gates_seen) + " gates in [" + fmt("%.4f", g_lo) +
                    ", " + fmt("%.4f", g_hi) + "]"};
}

// ---------------------------------------------------------------- 3

dsp::Waveform partial_sum(const std::vector<std::pair<double, double>>& partials, std::size_t n) {
  dsp::Waveform w{std::vector<double>(n, 0.0), 8000};
  for (const auto& [hz, amp] : partials)
    for (std::size_t i = 0; i < n; ++i) w.samples[i] += amp * std::sin(2 * kPi * hz * static_cast<double>(i) / 8000);
  return w;
}

Outcome dsp_suite() {
  num::Rng rng(31);
  double worst_rt = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    dsp::Waveform x{std::vector<double>(600 + rng.below(4000)), 8000};
    for (auto& s : x.samples) s = rng.uniform(-1, 1);
    const auto y = dsp::istft(dsp::stft(x, 512, 128));
    for (std::size_t i = 0; i < x.samples.size(); ++i) worst_rt = std::max(worst_rt, std::abs(x.samples[i] - y.samples[i]));
  }

  const std::vector<std::vector<std::pair<double, double>>> sums = {
      {{220, 0.4}, {440, 0.2}, {660, 0.1}},
      {{300, 0.3}, {1200, 0.3}},
      {{440, 0.2}, {554.37, 0.2}, {659.25, 0.2}},
      {{150, 0.3}, {300, 0.15}, {450, 0.1}, {600, 0.075}, {750, 0.06}},
      {{1000, 0.25}, {1100, 0.2}, {2500, 0.15}},
  };
  double worst_gl = 0.0, worst_rise = 0.0;
  for (const auto& p : sums) {
    const auto mag = dsp::magnitude(dsp::stft(partial_sum(p, 8000), 512, 128));
    num::Rng gl_rng(2026);
    const auto res = dsp::griffin_lim(mag, 50, gl_rng);
    worst_gl = std::max(worst_gl, res.convergence.back());
    for (std::size_t i = 1; i < res.convergence.size(); ++i)
      worst_rise = std::max(worst_rise, res.convergence[i] - res.convergence[i - 1]);
  }

  double worst_f0 = 0.0;
  std::size_t silent_tones = 0;
  const dsp::F0Options f0{512, 128, 60.0, 400.0, 0.3, 1e-4};
  for (double hz = 80; hz <= 380; hz += 5) {
    const auto track = dsp::estimate_f0(partial_sum({{hz, 0.5}}, 6000), f0);
    std::size_t voiced = 0;
    for (double v : track.hz) {
      if (v == 0.0) continue;
      ++voiced;
      worst_f0 = std::max(worst_f0, std::abs(v - hz));
    }
    silent_tones += voiced == 0;
  }
  const bool pass = worst_rt <= 1e-6 && worst_gl <= 0.1 && worst_rise <= 1e-7 && worst_f0 <= 2.0 && silent_tones == 0;
  return {pass, "STFT round trip " + fmt("%.1e", worst_rt) + "; Griffin-Lim worst C50 " + fmt("%.4f", worst_gl) +
                    ", largest rise " + fmt("%.1e", worst_rise) + "; F0 worst error " + fmt("%.3f", worst_f0) +
                    " Hz over 61 tones"};
}

// ---------------------------------------------------------------- shared training state

struct SeedRun {
  std::uint64_t seed = 0;
  fs::path corpus, run;
  double train_seconds = 0.0;
  model::Model trained;
};

double corpus_mel_l1(const model::Model& m, const std::vector<train::Example>& data) {
  // Masked mean over every valid cell of the corpus, batched for speed.
  double abs_sum = 0.0, cells = 0.0;
  for (std::size_t start = 0; start < data.size(); start += 16) {
    std::vector<std::vector<int>> texts;
    std::vector<std::vector<double>> mels;
    for (std::size_t i = start; i < std::min(data.size(), start + 16); ++i) {
      texts.push_back(data[i].symbols);
      mels.push_back(data[i].mel);
    }
    Tape tape(Tape::Mode::kInference);
    const auto fwd = model::forward_teacher_forced(tape, m, texts, mels);
    const auto packed = model::pack_frames(mels, m.config.n_mels, fwd.frames);
    const auto p = fwd.mel.values(), t = packed.values.values(), w = packed.mask.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      abs_sum += w[i] * std::abs(p[i] - t[i]);
      cells += w[i];
    }
  }
  return abs_sum / cells;
}

train::TrainConfig seed_config(std::uint64_t seed, const fs::path& corpus) {
  train::TrainConfig c;
  c.seed = seed;
  c.corpus = corpus.string();
  return c;
}

SeedRun train_seed(std::uint64_t seed, const fs::path& work, bool reuse) {
  SeedRun r;
  r.seed = seed;
  r.corpus = work / ("corpus_s" + std::to_string(seed));
  r.run = work / ("run_s" + std::to_string(seed));
  Clock clock;
  if (!(reuse && fs::exists(r.run / "final.stck"))) {
    fs::remove_all(r.corpus);
    fs::remove_all(r.run);
    corpus::build_corpus(64, seed, r.corpus);
    train::fit(seed_config(seed, r.corpus), r.run);
  }
  r.train_seconds = clock.seconds();
  r.trained = model::load_checkpoint(r.run / "final.stck");
  return r;
}

// ---------------------------------------------------------------- 4

Outcome convergence(const SeedRun& s7) {
  const auto config = seed_config(7, s7.corpus);
  const auto data = train::to_examples(corpus::load_training_view(s7.corpus), dsp::AudioConfig{});
  const double before = corpus_mel_l1(train::initial_model(config), data);
  const double after = corpus_mel_l1(s7.trained, data);
  const auto rows = slurp(s7.run / "loss.csv");
  const bool pass = after <= 0.5 * before && s7.train_seconds <= 1800.0;
  return {pass, "corpus mel L1 " + fmt("%.4f", before) + " at step 0 -> " + fmt("%.4f", after) + " after 2000 steps (" +
                    fmt("%.1f", 100.0 * after / before) + "%, limit 50%), training " +
                    fmt("%.0f", s7.train_seconds) + " s (limit 1800 s)"};
}

// ---------------------------------------------------------------- 5, 6

struct Discovery {
  std::uint64_t seed = 0;
  double tau = 0.0, purity = 0.0, agreement = 0.0, ratio = 0.0;
  std::size_t ranked = 0;
  std::size_t robotic_token = 0, neutral_token = 0;
  std::vector<double> mean_a, mean_b;
  double seconds = 0.0;
};

std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>> disjoint_text_sets(std::uint64_t seed) {
  num::Rng rng = num::Rng(seed).split(0x7465787473ULL);
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> all;
  while (all.size() < 10) {
    auto t = corpus::sample_text(rng, 5, 7);
    if (seen.insert(t).second) all.push_back(std::move(t));
  }
  return {{all.begin(), all.begin() + 5}, {all.begin() + 5, all.end()}};
}

Discovery discover(const SeedRun& run) {
  Clock clock;
  Discovery d;
  d.seed = run.seed;
  const auto& m = run.trained;
  const auto [set_a, set_b] = disjoint_text_sets(run.seed);
  std::vector<std::size_t> tokens(m.config.n_tokens);
  std::iota(tokens.begin(), tokens.end(), 0);
  const auto pa = style::token_f0_profile(m, set_a, tokens);
  const auto pb = style::token_f0_profile(m, set_b, tokens);
  std::vector<double> a, b;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    d.mean_a.push_back(pa.profiles[k].mean_f0);
    d.mean_b.push_back(pb.profiles[k].mean_f0);
    if (pa.profiles[k].used == 0 || pb.profiles[k].used == 0) continue;
    a.push_back(pa.profiles[k].mean_f0);
    b.push_back(pb.profiles[k].mean_f0);
  }
  d.ranked = a.size();
  d.tau = d.ranked >= 2 ? style::kendall_tau(a, b) : 0.0;

  const auto report = style::token_purity(m, run.corpus);
  d.purity = report.purity;
  d.agreement = report.majority_agreement;
  d.neutral_token = report.style_token[0];
  d.robotic_token = report.style_token[2];
  // Smoothed-F0 spread per token, pooled over both text sets.
  auto spread = [&](std::size_t k) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto* p : {&pa.profiles[k], &pb.profiles[k]}) {
      for (const auto& t : p->per_text) {
        if (t.unvoiced) continue;
        s += t.f0_std;
        ++n;
      }
    }
    return n ? s / static_cast<double>(n) : std::nan("");
  };
  const double robotic = spread(d.robotic_token), neutral = spread(d.neutral_token);
  d.ratio = neutral > 0 ? robotic / neutral : std::nan("");
  d.seconds = clock.seconds();
  return d;
}

// ---------------------------------------------------------------- 7

bool same_synthesis(const model::SynthesisResult& a, const model::SynthesisResult& b) {
  return a.frames == b.frames && a.mel == b.mel && a.linear == b.linear && a.trace.text == b.trace.text &&
         a.trace.style == b.trace.style && a.trace.gates == b.trace.gates;
}

bool same_forward(const model::Model& m, const std::vector<std::vector<int>>& texts,
                  const std::vector<std::vector<double>>& mels, const model::StyleDirective& x,
                  const model::StyleDirective& y) {
  Tape t1(Tape::Mode::kInference), t2(Tape::Mode::kInference);
  const auto a = model::forward_teacher_forced(t1, m, texts, mels, x);
  const auto b = model::forward_teacher_forced(t2, m, texts, mels, y);
  auto vec = [](const Tensor& t) { return std::vector<double>(t.values().begin(), t.values().end()); };
  return vec(a.mel) == vec(b.mel) && vec(a.linear) == vec(b.linear);
}

Outcome directive_algebra(const SeedRun& s7, const fs::path& work) {
  Clock clock;
  const fs::path untrained_path = work / "untrained.stck";
  model::save_checkpoint(untrained_path, train::initial_model(seed_config(7, s7.corpus)));
  const std::vector<std::pair<const char*, fs::path>> checkpoints = {{"untrained", untrained_path},
                                                                     {"trained", s7.run / "final.stck"}};
  const auto data = train::to_examples(corpus::load_training_view(s7.corpus), dsp::AudioConfig{});
  std::vector<std::vector<int>> texts;
  std::vector<std::vector<double>> mels;
  for (std::size_t i = 0; i < 4; ++i) {
    texts.push_back(data[i].symbols);
    mels.push_back(data[i].mel);
  }
  std::size_t comparisons = 0, mismatches = 0;
  for (const auto& [label, path] : checkpoints) {
    const auto m = model::load_checkpoint(path);
    const std::size_t K = m.config.n_tokens;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> onehot(K, 0.0);
      onehot[k] = 1.0;
      const auto f = model::StyleDirective::force(k), i = model::StyleDirective::interpolate(onehot);
      for (const auto& t : texts) {
        mismatches += !same_synthesis(model::synthesize(m, t, f, 150), model::synthesize(m, t, i, 150));
        ++comparisons;
      }
      mismatches += !same_forward(m, texts, mels, f, i);
      ++comparisons;
    }
    const auto zero = model::StyleDirective::bias(std::vector<double>(m.config.d_tok, 0.0));
    for (const auto& t : texts) {
      mismatches += !same_synthesis(model::synthesize(m, t, zero, 150),
                                    model::synthesize(m, t, model::StyleDirective::none(), 150));
      ++comparisons;
    }
    mismatches += !same_forward(m, texts, mels, zero, model::StyleDirective::none());
    ++comparisons;
  }
  const double secs = clock.seconds();
  return {mismatches == 0 && secs < 60.0, std::to_string(comparisons - mismatches) + "/" +
                                              std::to_string(comparisons) +
                                              " bitwise-equal comparisons on untrained and trained checkpoints, " +
                                              fmt("%.1f", secs) + " s"};
}

// ---------------------------------------------------------------- 8, 9 helpers

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "styletok");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "cli %s failed: %s\n", args[1].c_str(), err.str().c_str());
  return code;
}

std::string without_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

void write_texts(const fs::path& path, const std::vector<std::vector<int>>& texts) {
  std::ofstream o(path);
  for (const auto& t : texts) {
    for (std::size_t i = 0; i < t.size(); ++i) o << (i ? "," : "") << t[i];
    o << "\n";
  }
}

std::string join(const std::vector<int>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s;
}

// Artifacts emitted through the command-line front end for one output directory.
bool emit_artifacts(const fs::path& dir, const fs::path& ckpt, const std::vector<std::vector<int>>& texts) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_texts(dir / "texts.txt", texts);
  bool ok = true;
  ok &= cli({"synth", "--text", join(texts[0]), "--ckpt", ckpt.string(), "--force", "1", "--out-prefix",
             (dir / "forced").string()}) == 0;
  ok &= cli({"synth", "--text", join(texts[1]), "--ckpt", ckpt.string(), "--bias", "2", "--scale", "0.5",
             "--out-prefix", (dir / "biased").string()}) == 0;
  ok &= cli({"profile", "--ckpt", ckpt.string(), "--texts-file", (dir / "texts.txt").string(), "--tokens", "0,1,2",
             "--out-prefix", (dir / "profile").string()}) == 0;
  ok &= cli({"overlay", "--ckpt", ckpt.string(), "--text", join(texts[0]), "--out", (dir / "overlay.svg").string()}) ==
        0;
  return ok;
}

Outcome determinism(const SeedRun& s7, const fs::path& work, const std::vector<std::vector<int>>& texts) {
  std::vector<std::string> problems;
  // Dataset.
  const fs::path corpus_b = work / "determinism_corpus";
  fs::remove_all(corpus_b);
  corpus::build_corpus(64, 7, corpus_b);
  for (const auto& f : tree_diff(s7.corpus, corpus_b)) problems.push_back("dataset:" + f);
  // Training: the same config retrained from scratch.
  const fs::path run_b = work / "determinism_run";
  fs::remove_all(run_b);
  train::fit(seed_config(7, corpus_b), run_b);
  std::size_t checkpoints = 0;
  for (const auto& e : fs::directory_iterator(s7.run)) {
    if (e.path().extension() != ".stck") continue;
    ++checkpoints;
    if (slurp(e.path()) != slurp(run_b / e.path().filename())) problems.push_back("checkpoint:" + e.path().filename().string());
  }
  if (without_seconds(slurp(s7.run / "loss.csv")) != without_seconds(slurp(run_b / "loss.csv"))) {
    problems.push_back("loss.csv");
  }
  // Synthesis and plot files.
  const bool ok_a = emit_artifacts(work / "artifacts_a", s7.run / "final.stck", texts);
  const bool ok_b = emit_artifacts(work / "artifacts_b", run_b / "final.stck", texts);
  if (!ok_a || !ok_b) problems.push_back("cli failure");
  const auto diff = tree_diff(work / "artifacts_a", work / "artifacts_b");
  for (const auto& f : diff) problems.push_back("artifact:" + f);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(work / "artifacts_a")) files += e.is_regular_file();

  std::string detail = "dataset tree, " + std::to_string(checkpoints) + " checkpoints, loss curve (timing column excluded), " +
                       std::to_string(files) + " synthesis/CSV/SVG files compared";
  if (!problems.empty()) {
    detail += "; differing:";
    for (std::size_t i = 0; i < std::min<std::size_t>(problems.size(), 6); ++i) detail += " " + problems[i];
  }
  return {problems.empty(), detail};
}

// Minimal well-formedness check: every opened element is closed in order.
bool balanced_xml(const std::string& svg) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else if (m[3] != "/") {
      stack.push_back(m[2]);
    }
  }
  return stack.empty() && svg.find("<svg") != std::string::npos;
}

std::vector<std::pair<double, double>> points(const std::string& element) {
  std::vector<std::pair<double, double>> out;
  const auto p = element.find("points=\"");
  if (p == std::string::npos) return out;
  std::istringstream in(element.substr(p + 8, element.find('"', p + 8) - p - 8));
  std::string pt;
  while (in >> pt) {
    const auto c = pt.find(',');
    out.emplace_back(std::stod(pt.substr(0, c)), std::stod(pt.substr(c + 1)));
  }
  return out;
}

std::vector<std::string> elements(const std::string& svg, const std::string& prefix) {
  std::vector<std::string> out;
  for (auto p = svg.find(prefix); p != std::string::npos; p = svg.find(prefix, p + 1)) {
    out.push_back(svg.substr(p, svg.find('>', p) - p + 1));
  }
  return out;
}

double attr(const std::string& element, const std::string& name) {
  const auto p = element.find(name + "=\"");
  if (p == std::string::npos) return std::nan("");
  return std::stod(element.substr(p + name.size() + 2));
}

Outcome artifact_plots(const fs::path& work) {
  const fs::path dir = work / "artifacts_a";
  std::vector<std::string> problems;
  const std::string f0 = slurp(dir / "profile.svg");
  const std::string overlay = slurp(dir / "overlay.svg");
  if (!balanced_xml(f0)) problems.push_back("profile.svg malformed");
  if (!balanced_xml(overlay)) problems.push_back("overlay.svg malformed");

  // Profile: panels, one polyline per token in each, axes labelled, points inside the panel.
  const auto panels = elements(f0, "<g class=\"panel\"");
  std::size_t polylines = 0;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto begin = f0.find(panels[p]);
    const auto end = f0.find("</g>", begin);
    const std::string body = f0.substr(begin, end - begin);
    std::set<std::string> tokens;
    for (const auto& pl : elements(body, "<polyline")) {
      ++polylines;
      const auto t = pl.find("data-token=\"");
      tokens.insert(pl.substr(t + 12, pl.find('"', t + 12) - t - 12));
      for (const auto& [x, y] : points(pl)) {
        if (x < -1e-9 || x > 360 + 1e-9 || y < -1e-9 || y > 220 + 1e-9) problems.push_back("f0 point out of axes");
      }
    }
    if (tokens != std::set<std::string>{"0", "1", "2"} || elements(body, "<polyline").size() != 3) {
      problems.push_back("panel " + std::to_string(p) + " polylines");
    }
    if (body.find(">time (s)<") == std::string::npos || body.find(">F0 (Hz)<") == std::string::npos) {
      problems.push_back("panel " + std::to_string(p) + " axis labels");
    }
  }
  if (panels.size() != 5) problems.push_back("expected 5 panels, found " + std::to_string(panels.size()));
  // Voiced rows in the CSV match the plotted points.
  std::size_t plotted = 0;
  for (const auto& pl : elements(f0, "<polyline")) plotted += points(pl).size();
  const std::string csv = slurp(dir / "profile.csv");
  const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
  if (rows != plotted) problems.push_back("csv rows " + std::to_string(rows) + " vs points " + std::to_string(plotted));

  // Overlay: heatmap cells, dashed weight line spanning the frame axis inside [0, height].
  const auto plot = elements(overlay, "<g class=\"plot\"");
  const double frames = plot.empty() ? 0 : attr(plot[0], "data-frames");
  const double mels = plot.empty() ? 0 : attr(plot[0], "data-n-mels");
  const auto cells = elements(overlay, "<rect x=").size();
  if (cells != static_cast<std::size_t>(frames * mels)) problems.push_back("heatmap cells");
  const auto line = elements(overlay, "<polyline class=\"g-text\"");
  double x_lo = 1e9, x_hi = -1e9, y_lo = 1e9, y_hi = -1e9;
  if (line.size() != 1 || line[0].find("stroke-dasharray") == std::string::npos) {
    problems.push_back("dashed weight line");
  } else {
    for (const auto& [x, y] : points(line[0])) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
    if (x_lo != 0.0 || std::abs(x_hi - frames * style::kOverlayFrameWidth) > 1e-9) problems.push_back("x extent");
    if (y_lo < 0.0 || y_hi > style::kOverlayHeight) problems.push_back("y extent");
  }
  std::string detail = std::to_string(panels.size()) + " F0 panels with " + std::to_string(polylines) +
                       " token polylines, " + std::to_string(rows) + " CSV rows; overlay " +
                       fmt("%.0f", frames) + " frames x " + fmt("%.0f", mels) + " mels, weight line x in [" +
                       fmt("%.0f", x_lo) + ", " + fmt("%.0f", x_hi) + "]";
  if (!problems.empty()) {
    detail += "; problems:";
    for (std::size_t i = 0; i < std::min<std::size_t>(problems.size(), 5); ++i) detail += " " + problems[i] + ";";
  }
  return {problems.empty(), detail};
}

void report(int n, const char* name, const Outcome& o, double seconds) {
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), seconds);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string work = (fs::temp_directory_path() / "styletok_acceptance").string();
  std::vector<int> only;
  bool reuse = false;
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria");
  app.add_flag("--reuse", reuse, "Reuse finished training runs found in the scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);
  auto wanted = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };

  int failures = 0;
  auto run = [&](int n, const char* name, const std::function<Outcome()>& fn) {
    if (!wanted(n)) return;
    Clock c;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(n, name, o, c.seconds());
    failures += !o.pass;
  };

  run(1, "gradient suite", [&] {
    Clock c;
    auto o = gradient_suite();
    o.pass &= c.seconds() < 120.0;
    return o;
  });
  run(2, "attention and controller invariants", [&] {
    Clock c;
    auto o = attention_invariants();
    o.pass &= c.seconds() < 60.0;
    return o;
  });
  run(3, "DSP suite", [&] {
    Clock c;
    auto o = dsp_suite();
    o.pass &= c.seconds() < 120.0;
    return o;
  });

  const bool need_training = wanted(4) || wanted(5) || wanted(6) || wanted(7) || wanted(8) || wanted(9);
  if (!need_training) return failures == 0 ? 0 : 1;

  std::vector<SeedRun> runs;
  Clock training;
  try {
    runs.push_back(train_seed(7, work, reuse));
  } catch (const std::exception& e) {
    for (int n = 4; n <= 9; ++n) {
      if (wanted(n)) report(n, "training", {false, std::string("seed-7 training failed: ") + e.what()}, 0.0);
    }
    return 1;
  }
  run(4, "training convergence", [&] { return convergence(runs[0]); });

  if (wanted(5) || wanted(6)) {
    Clock c;
    std::vector<Discovery> found;
    std::string error;
    try {
      for (std::uint64_t seed : {8u, 9u}) runs.push_back(train_seed(seed, work, reuse));
      for (const auto& r : runs) found.push_back(discover(r));
    } catch (const std::exception& e) {
      error = e.what();
    }
    double total = runs[0].train_seconds + c.seconds();
    std::string d5, d6;
    int ok5 = 0, ok6 = 0;
    for (const auto& d : found) {
      const bool p5 = d.tau >= 0.6 && d.purity >= 0.6;
      const bool p6 = d.ratio <= 0.5;
      ok5 += p5;
      ok6 += p6;
      d5 += " seed " + std::to_string(d.seed) + ": tau " + fmt("%.3f", d.tau) + " over " + std::to_string(d.ranked) +
            " voiced tokens, purity " + fmt("%.3f", d.purity) +
            " (style-majority agreement " + fmt("%.3f", d.agreement) + ")" + (p5 ? " ok;" : " no;");
      d6 += " seed " + std::to_string(d.seed) + ": robotic token " + std::to_string(d.robotic_token) +
            ", neutral token " + std::to_string(d.neutral_token) + ", F0 std ratio " +
            (std::isnan(d.ratio) ? std::string("undefined (token renders no voiced frames)") : fmt("%.3f", d.ratio)) +
            (p6 ? " ok;" : " no;");
    }
    if (!error.empty()) d5 += " error: " + error;
    if (wanted(5)) {
      report(5, "unsupervised style discovery",
             {ok5 >= 2 && total <= 5400.0,
              std::to_string(ok5) + "/3 seeds pass (need 2)," + d5 + " total " + fmt("%.0f", total) + " s"},
             c.seconds());
      failures += !(ok5 >= 2 && total <= 5400.0);
    }
    if (wanted(6)) {
      report(6, "flat-style analogue", {ok6 >= 2, std::to_string(ok6) + "/3 seeds pass (need 2)," + d6}, 0.0);
      failures += ok6 < 2;
    }
  }

  const auto texts = disjoint_text_sets(7).first;
  run(7, "directive algebra", [&] { return directive_algebra(runs[0], work); });
  run(8, "determinism", [&] { return determinism(runs[0], work, texts); });
  run(9, "artifact plots", [&] {
    if (!fs::exists(fs::path(work) / "artifacts_a" / "overlay.svg")) {
      if (!emit_artifacts(fs::path(work) / "artifacts_a", runs[0].run / "final.stck", texts)) {
        return Outcome{false, "artifact emission failed"};
      }
    }
    return artifact_plots(work);
  });
  std::printf("%d of the requested criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
