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

#include "styletok/cli/run.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "styletok/corpus/dataset.hpp"
#include "styletok/corpus/spg.hpp"
#include "styletok/dsp/levels.hpp"
#include "styletok/dsp/wav.hpp"
#include "styletok/error.hpp"
#include "styletok/model/checkpoint.hpp"
#include "styletok/style_control/style_control.hpp"
#include "styletok/train/trainer.hpp"

namespace styletok::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, const std::string& flag, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError(flag + ": empty list element in '" + text + "'");
    item = item.substr(b, e - b + 1);
    std::size_t used = 0;
    T v{};
    try {
      v = parse(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) throw UsageError(flag + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("STYLE_TOKENS_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  const std::string text(s);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.front() == '-') throw UsageError("STYLE_TOKENS_SEED: not an unsigned integer: " + text);
  return v;
}

std::uint64_t resolve_seed(std::uint64_t configured, std::ostream& out) {
  const auto e = env_seed();
  const std::uint64_t seed = e ? *e : configured;
  out << "seed: " << seed << (e ? " (STYLE_TOKENS_SEED)" : "") << "\n";
  return seed;
}

model::Model load_model(const std::string& path) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path);
  return model::load_checkpoint(path);
}

corpus::SpgMatrix as_spg(const std::vector<double>& levels, std::size_t frames, std::size_t bins,
                         const dsp::AudioConfig& audio) {
  return {frames, bins, dsp::level_to_amplitude(levels, audio)};
}

json trace_json(const model::SynthesisResult& r, const model::Model& m, const std::vector<int>& symbols,
                const model::StyleDirective& d) {
  const auto& tr = r.trace;
  json a_text = json::array(), a_style = json::array(), gates = json::array();
  for (std::size_t s = 0; s < tr.steps; ++s) {
    json t = json::array(), st = json::array();
    for (std::size_t i = 0; i < tr.text_len; ++i) t.push_back(tr.text_at(s, i));
    for (std::size_t k = 0; k < tr.n_tokens; ++k) st.push_back(tr.style_at(s, k));
    a_text.push_back(std::move(t));
    a_style.push_back(std::move(st));
    gates.push_back({tr.gate_at(s, 0), tr.gate_at(s, 1)});
  }
  const auto& c = m.config;
  json config = {{"alphabet", c.alphabet},
                 {"n_tokens", c.n_tokens},
                 {"d_tok", c.d_tok},
                 {"d_txt", c.d_txt},
                 {"d_enc", c.d_enc},
                 {"d_att", c.d_att},
                 {"d_dec", c.d_dec},
                 {"r", c.r},
                 {"n_mels", c.n_mels},
                 {"n_linear_bins", c.n_linear_bins},
                 {"use_postnet", c.use_postnet},
                 {"gates", c.gates == model::GateMode::kIndependent ? "independent" : "complementary"},
                 {"silence_threshold", c.silence_threshold}};
  return {{"symbols", symbols}, {"directive", d.describe()}, {"frames", r.frames}, {"steps", tr.steps},
          {"config", config},   {"A_text", a_text},          {"A_style", a_style}, {"G", gates}};
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw IoError("cannot open for writing: " + path.string());
  o << body;
  if (!o) throw IoError("write failed: " + path.string());
}

std::vector<std::vector<int>> read_texts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open texts file: " + path);
  std::vector<std::vector<int>> texts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.back() == '\r') line.pop_back();
    texts.push_back(parse_int_list(line, "--texts-file line " + std::to_string(texts.size() + 1)));
  }
  if (texts.empty()) throw IoError("no texts in " + path);
  return texts;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  return parse_list<int>(text, flag, [](const std::string& s, std::size_t* used) { return std::stoi(s, used); });
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  auto v = parse_list<double>(text, flag, [](const std::string& s, std::size_t* used) { return std::stod(s, used); });
  for (double x : v) {
    if (!std::isfinite(x)) throw UsageError(flag + ": values must be finite");
  }
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Style-token speech synthesis toolkit", args.empty() ? "styletok" : args[0]};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Render a synthetic dataset");
  std::size_t corpus_n = 64;
  std::uint64_t corpus_seed = 7;
  std::string corpus_out;
  corpus_cmd->add_option("--n", corpus_n, "Number of utterances")->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--seed", corpus_seed, "Dataset seed");
  corpus_cmd->add_option("--out", corpus_out, "Output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a model from a JSON config");
  std::string train_config, train_out = "run", train_resume;
  train_cmd->add_option("--config", train_config, "Training config (JSON)")->required();
  train_cmd->add_option("--out", train_out, "Output directory for checkpoints and loss.csv");
  train_cmd->add_option("--resume", train_resume, "Checkpoint to resume from");

  // shared synthesis flags
  std::size_t max_steps = 150, gl_iters = 50;
  std::uint64_t gl_seed = 0;
  auto add_synth_flags = [&](CLI::App* cmd) {
    cmd->add_option("--max-steps", max_steps, "Decoder step limit")->check(CLI::PositiveNumber);
    cmd->add_option("--gl-iters", gl_iters, "Griffin-Lim iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", gl_seed, "Griffin-Lim phase seed");
  };

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize one text");
  std::string synth_text, synth_ckpt, synth_prefix, synth_interp;
  std::optional<std::size_t> synth_force, synth_bias;
  double synth_scale = 1.0;
  synth_cmd->add_option("--text", synth_text, "Comma-separated symbol ids")->required();
  synth_cmd->add_option("--ckpt", synth_ckpt, "Model checkpoint")->required();
  auto* o_force = synth_cmd->add_option("--force", synth_force, "Force style attention onto token K");
  auto* o_bias = synth_cmd->add_option("--bias", synth_bias, "Bias the token bank towards token K");
  auto* o_scale = synth_cmd->add_option("--scale", synth_scale, "Bias scale (with --bias)");
  auto* o_interp = synth_cmd->add_option("--interp", synth_interp, "Comma-separated style weights, one per token");
  o_force->excludes(o_bias)->excludes(o_interp);
  o_bias->excludes(o_interp);
  o_scale->needs(o_bias);
  synth_cmd->add_option("--out-prefix", synth_prefix, "Output path prefix")->required();
  add_synth_flags(synth_cmd);

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "Smoothed-F0 profile of forced tokens");
  std::string profile_ckpt, profile_texts, profile_tokens, profile_prefix = "profile";
  double profile_bias = 0.0;
  profile_cmd->add_option("--ckpt", profile_ckpt, "Model checkpoint")->required();
  profile_cmd->add_option("--texts-file", profile_texts, "One comma-separated text per line")->required();
  profile_cmd->add_option("--tokens", profile_tokens, "Comma-separated token ids (default: all)");
  profile_cmd->add_option("--bias-scale", profile_bias, "Profile by bias(scale * E[k]) instead of force-attend");
  profile_cmd->add_option("--out-prefix", profile_prefix, "Output path prefix");
  add_synth_flags(profile_cmd);

  // purity
  auto* purity_cmd = app.add_subcommand("purity", "Token purity against ground-truth styles");
  std::string purity_ckpt, purity_dataset, purity_out;
  purity_cmd->add_option("--ckpt", purity_ckpt, "Model checkpoint")->required();
  purity_cmd->add_option("--dataset", purity_dataset, "Dataset directory with manifest.jsonl")->required();
  purity_cmd->add_option("--out", purity_out, "Report path (default: stdout)");

  // overlay
  auto* overlay_cmd = app.add_subcommand("overlay", "Mixing-weight overlay on the predicted mel spectrogram");
  std::string overlay_ckpt, overlay_text, overlay_out = "overlay.svg";
  overlay_cmd->add_option("--ckpt", overlay_ckpt, "Model checkpoint")->required();
  overlay_cmd->add_option("--text", overlay_text, "Comma-separated symbol ids")->required();
  overlay_cmd->add_option("--out", overlay_out, "SVG path");
  overlay_cmd->add_option("--max-steps", max_steps, "Decoder step limit")->check(CLI::PositiveNumber);

  // CLI11 consumes the argument vector from the back.
  std::vector<std::string> rev;
  for (std::size_t i = args.size(); i > 1; --i) rev.push_back(args[i - 1]);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    const dsp::AudioConfig audio;
    auto synth_opts = [&](const model::Model& m) {
      style::SynthOptions o;
      o.audio.n_mels = m.config.n_mels;
      o.max_steps = max_steps;
      o.griffin_lim_iterations = gl_iters;
      o.griffin_lim_seed = resolve_seed(gl_seed, out);
      return o;
    };

    if (*corpus_cmd) {
      const std::uint64_t seed = resolve_seed(corpus_seed, out);
      const auto manifest = corpus::build_corpus(corpus_n, seed, corpus_out);
      out << "wrote " << manifest.records.size() << " utterances to " << corpus_out << "\n";
    } else if (*train_cmd) {
      if (!fs::exists(train_config)) throw IoError("config not found: " + train_config);
      train::TrainConfig cfg;
      try {
        cfg = train::load_train_config(train_config);
      } catch (const ContractError& e) {
        throw UsageError(std::string(e.what()) + " (" + train_config + ")");
      }
      cfg.seed = resolve_seed(cfg.seed, out);
      std::optional<fs::path> resume;
      if (!train_resume.empty()) {
        if (!fs::exists(train_resume)) throw IoError("checkpoint not found: " + train_resume);
        resume = train_resume;
      }
      const auto result = train::fit(cfg, train_out, resume, [&](const train::LossReport& r) {
        if (r.step % 100 == 0 || r.step + 1 == cfg.steps) {
          out << "step " << r.step << " mel_l1 " << r.mel_l1 << " lin_l1 " << r.lin_l1 << "\n";
        }
      });
      out << "final checkpoint: " << result.final_checkpoint.string() << "\n"
          << "loss curve: " << result.loss_curve.string() << "\n";
    } else if (*synth_cmd) {
      const auto symbols = parse_int_list(synth_text, "--text");
      std::vector<double> lambda;
      if (!synth_interp.empty()) lambda = parse_double_list(synth_interp, "--interp");
      if (!std::isfinite(synth_scale)) throw UsageError("--scale must be finite");
      const auto m = load_model(synth_ckpt);
      const auto opts = synth_opts(m);
      model::StyleDirective d = model::StyleDirective::none();
      if (synth_force) d = model::StyleDirective::force(*synth_force);
      if (synth_bias) d = style::bias_directive(m, *synth_bias, synth_scale);
      if (!synth_interp.empty()) d = model::StyleDirective::interpolate(lambda);
      const auto res = style::synth_directed(m, symbols, d, opts);
      const fs::path prefix = synth_prefix;
      auto with = [&](const char* ext) {
        fs::path p = prefix;
        p += ext;
        return p;
      };
      const auto& s = res.synthesis;
      corpus::write_spg(with(".mel"), as_spg(s.mel, s.frames, m.config.n_mels, opts.audio));
      corpus::write_spg(with(".lin"), as_spg(s.linear, s.frames, m.config.n_linear_bins, opts.audio));
      dsp::write_wav(with(".wav"), dsp::to_pcm16(res.waveform));
      write_file(with(".trace.json"), trace_json(s, m, symbols, d).dump(1) + "\n");
      out << "directive: " << d.describe() << "\nframes: " << s.frames << "\nwrote " << with(".{mel,lin,wav,trace.json}").string()
          << "\n";
    } else if (*profile_cmd) {
      const auto m = load_model(profile_ckpt);
      std::vector<std::size_t> tokens;
      if (profile_tokens.empty()) {
        for (std::size_t k = 0; k < m.config.n_tokens; ++k) tokens.push_back(k);
      } else {
        for (int k : parse_int_list(profile_tokens, "--tokens")) {
          if (k < 0) throw UsageError("--tokens: negative token id");
          tokens.push_back(static_cast<std::size_t>(k));
        }
      }
      const auto texts = read_texts(profile_texts);
      style::ProfileOptions po;
      po.synth = synth_opts(m);
      po.bias_scale = profile_bias;
      const auto run = style::token_f0_profile(m, texts, tokens, po);
      std::ostringstream csv;
      csv << "token,text,voiced,mean_f0_hz,slope_hz_per_s,f0_std_hz,flagged\n";
      char buf[160];
      for (const auto& p : run.profiles) {
        for (const auto& t : p.per_text) {
          std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.3f,%.3f,%.3f,%d\n", p.token, t.text, t.voiced, t.mean_f0,
                        t.slope, t.f0_std, t.unvoiced ? 1 : 0);
          csv << buf;
        }
      }
      for (const auto& p : run.profiles) {
        std::snprintf(buf, sizeof buf, "%zu,all,%zu,%.3f,,%.3f,%zu\n", p.token, p.used, p.mean_f0, p.f0_std,
                      p.texts - p.used);
        csv << buf;
      }
      fs::path table = profile_prefix;
      table += ".profile.csv";
      write_file(table, csv.str());
      style::emit_f0_plot(run.curves, profile_prefix);
      out << "wrote " << table.string() << ", " << profile_prefix << ".csv, " << profile_prefix << ".svg\n";
    } else if (*purity_cmd) {
      if (!fs::exists(purity_dataset)) throw IoError("dataset not found: " + purity_dataset);
      const auto m = load_model(purity_ckpt);
      const auto r = style::token_purity(m, purity_dataset);
      json table = json::array();
      for (std::size_t k = 0; k < r.n_tokens; ++k) {
        json row = json::array();
        for (std::size_t s = 0; s < r.n_styles; ++s) row.push_back(r.count(k, s));
        table.push_back(row);
      }
      const json report = {{"purity", r.purity},
                           {"majority_agreement", r.majority_agreement},
                           {"n_tokens", r.n_tokens},
                           {"n_styles", r.n_styles},
                           {"contingency", table},
                           {"style_token", r.style_token},
                           {"assignments", r.assignments}};
      if (purity_out.empty()) {
        out << report.dump(1) << "\n";
      } else {
        write_file(purity_out, report.dump(1) + "\n");
        out << "purity " << r.purity << " written to " << purity_out << "\n";
      }
    } else if (*overlay_cmd) {
      const auto symbols = parse_int_list(overlay_text, "--text");
      const auto m = load_model(overlay_ckpt);
      const auto s = model::synthesize(m, symbols, model::StyleDirective::none(), max_steps);
      style::emit_mixing_overlay(s.mel, m.config.n_mels, s.trace, m.config.r, overlay_out);
      out << "wrote " << overlay_out << "\n";
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace styletok::cli
