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

#include "styletok/corpus/dataset.hpp"

#include <cstdio>
#include <fstream>
#include "json.hpp"

#include "styletok/dsp/wav.hpp"
#include "styletok/error.hpp"

namespace styletok::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

int draw_style(num::Rng& rng, const std::vector<double>& weights) {
  if (weights.empty()) throw ContractError("draw_style: no style weights");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw ContractError("draw_style: negative style weight");
    total += w;
  }
  if (total <= 0) throw ContractError("draw_style: style weights sum to zero");
  const double u = rng.uniform() * total;
  double acc = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size() - 1);
}

std::vector<PlannedUtterance> plan_corpus(std::size_t n, std::uint64_t seed, const CorpusOptions& opts) {
  if (n < 1) throw ContractError("corpus size must be >= 1");
  if (opts.weights.size() != opts.styles.size()) throw ContractError("one weight per style required");
  const num::Rng master(seed);
  std::vector<PlannedUtterance> out;
  for (std::size_t i = 0; i < n; ++i) {
    num::Rng rng = master.split(i);
    PlannedUtterance p;
    char id[32];
    std::snprintf(id, sizeof id, "u%05zu", i);
    p.id = id;
    p.style_id = opts.styles[draw_style(rng, opts.weights)].id;
    p.symbols = sample_text(rng, opts.min_len, opts.max_len);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

const StyleClass& style_by_id(const std::vector<StyleClass>& styles, int id) {
  for (const auto& s : styles) {
    if (s.id == id) return s;
  }
  throw ContractError("unknown style id " + std::to_string(id));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

json style_json(const StyleClass& s, double weight) {
  return {{"id", s.id},
          {"label", s.label},
          {"weight", weight},
          {"f0_scale", s.f0_scale},
          {"f0_slope", s.f0_slope},
          {"f0_flatten", s.f0_flatten},
          {"duration_scale", s.duration_scale}};
}

}  // namespace

DatasetManifest build_corpus(std::size_t n, std::uint64_t seed, const fs::path& dir, const CorpusOptions& opts) {
  const auto plan = plan_corpus(n, seed, opts);
  std::error_code ec;
  fs::create_directories(dir / "wav", ec);
  fs::create_directories(dir / "spec", ec);
  if (ec) throw IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());

  const num::Rng master(seed);
  DatasetManifest manifest{seed, opts.styles, opts.weights, {}};
  std::string labelled, unlabelled;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& p = plan[i];
    // Same stream the plan drew from, advanced past the text and style draws.
    num::Rng rng = master.split(i);
    draw_style(rng, opts.weights);
    sample_text(rng, opts.min_len, opts.max_len);
    const Utterance u = render_utterance(p.symbols, style_by_id(opts.styles, p.style_id), rng, opts.render);

    ManifestRecord r{p.id, p.symbols, p.style_id, u.frames(), u.voiced_frames,
                     "wav/" + p.id + ".wav", "spec/" + p.id + ".lin", "spec/" + p.id + ".mel"};
    dsp::write_wav(dir / r.wav, dsp::to_pcm16(u.waveform));
    write_spg(dir / r.lin, SpgMatrix{u.linear.frames, u.linear.bins, u.linear.data});
    write_spg(dir / r.mel, SpgMatrix{u.mel.frames, u.mel.n_mels, u.mel.data});

    json rec = {{"id", r.id},   {"symbols", r.symbols}, {"style_id", r.style_id}, {"frames", r.frames},
                {"voiced_frames", r.voiced_frames}, {"wav", r.wav}, {"lin", r.lin}, {"mel", r.mel}};
    labelled += rec.dump() + "\n";
    rec.erase("style_id");
    unlabelled += rec.dump() + "\n";
    manifest.records.push_back(std::move(r));
  }

  json meta = {{"seed", seed}, {"n", n}, {"styles", json::array()}};
  for (std::size_t k = 0; k < opts.styles.size(); ++k) meta["styles"].push_back(style_json(opts.styles[k], opts.weights[k]));
  const auto& a = opts.render.audio;
  meta["audio"] = {{"sample_rate", a.sample_rate}, {"n_fft", a.n_fft}, {"hop", a.hop},
                   {"n_mels", a.n_mels},           {"fmin", a.fmin},   {"fmax", a.fmax}};
  write_text(dir / "corpus.json", meta.dump(2) + "\n");
  write_text(dir / "manifest.jsonl", labelled);
  write_text(dir / "train.jsonl", unlabelled);
  return manifest;
}

DatasetManifest load_manifest(const fs::path& dir) {
  DatasetManifest m;
  {
    std::ifstream in(dir / "corpus.json");
    if (!in) throw IoError("cannot open: " + (dir / "corpus.json").string());
    json meta;
    try {
      meta = json::parse(in);
      m.seed = meta.at("seed").get<std::uint64_t>();
      for (const auto& s : meta.at("styles")) {
        m.styles.push_back({s.at("id").get<int>(), s.at("label").get<std::string>(), s.at("f0_scale").get<double>(),
                            s.at("f0_slope").get<double>(), s.at("f0_flatten").get<bool>(),
                            s.at("duration_scale").get<double>()});
        m.weights.push_back(s.at("weight").get<double>());
      }
    } catch (const json::exception& e) {
      throw IoError((dir / "corpus.json").string() + ": " + e.what());
    }
  }
  for (const auto& j : read_jsonl(dir / "manifest.jsonl")) {
    try {
      m.records.push_back({j.at("id").get<std::string>(), j.at("symbols").get<std::vector<int>>(),
                           j.at("style_id").get<int>(), j.at("frames").get<std::size_t>(),
                           j.at("voiced_frames").get<std::size_t>(), j.at("wav").get<std::string>(),
                           j.at("lin").get<std::string>(), j.at("mel").get<std::string>()});
    } catch (const json::exception& e) {
      throw IoError((dir / "manifest.jsonl").string() + ": " + e.what());
    }
  }
  return m;
}

void verify_manifest(const fs::path& dir, const DatasetManifest& manifest) {
  for (const auto& r : manifest.records) {
    for (const auto& rel : {r.wav, r.lin, r.mel}) {
      if (!fs::exists(dir / rel)) throw IoError("missing file: " + (dir / rel).string());
    }
    for (const auto& rel : {r.lin, r.mel}) {
      const auto [frames, bins] = read_spg_dims(dir / rel);
      if (frames != r.frames) {
        throw IoError((dir / rel).string() + ": header has " + std::to_string(frames) + " frames, manifest says " +
                      std::to_string(r.frames));
      }
    }
  }
}

std::vector<TrainingRecord> load_training_view(const fs::path& dir) {
  std::vector<TrainingRecord> out;
  for (const auto& j : read_jsonl(dir / "train.jsonl")) {
    TrainingRecord t;
    try {
      t.id = j.at("id").get<std::string>();
      t.symbols = j.at("symbols").get<std::vector<int>>();
      t.mel = read_spg(dir / j.at("mel").get<std::string>());
      t.linear = read_spg(dir / j.at("lin").get<std::string>());
    } catch (const json::exception& e) {
      throw IoError((dir / "train.jsonl").string() + ": " + e.what());
    }
    if (t.mel.frames != t.linear.frames) throw IoError("frame count mismatch between mel and linear for " + t.id);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace styletok::corpus
