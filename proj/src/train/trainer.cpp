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

#include "styletok/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "styletok/dsp/levels.hpp"
#include "styletok/error.hpp"
#include "styletok/model/checkpoint.hpp"

namespace styletok::train {

namespace fs = std::filesystem;
using num::Tensor;

LossTerms reconstruction_loss(num::Tape& tape, const Tensor& pred_mel, const Tensor& pred_lin,
                              const model::PackedFrames& mel_target, const model::PackedFrames& lin_target,
                              double w_mel, double w_lin) {
  LossTerms out;
  const Tensor mel = num::l1_loss(tape, pred_mel, mel_target.values, mel_target.mask);
  out.mel_l1 = mel.item();
  out.total = num::scale(tape, mel, w_mel);
  if (pred_lin.defined()) {
    const Tensor lin = num::l1_loss(tape, pred_lin, lin_target.values, lin_target.mask);
    out.lin_l1 = lin.item();
    out.total = num::add(tape, out.total, num::scale(tape, lin, w_lin));
  } else if (w_lin != 0.0) {
    throw ContractError("reconstruction_loss: w_lin must be 0 without a linear prediction");
  }
  return out;
}

std::vector<Example> to_examples(const std::vector<corpus::TrainingRecord>& records, const dsp::AudioConfig& audio) {
  std::vector<Example> out;
  for (const auto& r : records) {
    if (r.mel.frames == 0 || r.mel.frames != r.linear.frames) {
      throw IoError("record " + r.id + ": inconsistent frame counts");
    }
    out.push_back({r.id, r.symbols, dsp::amplitude_to_level(r.mel.data, audio),
                   dsp::amplitude_to_level(r.linear.data, audio), r.mel.frames});
  }
  return out;
}

std::vector<std::size_t> batch_for_step(const std::vector<Example>& data, std::size_t batch_size, std::uint64_t seed,
                                        std::size_t step) {
  const std::size_t n = data.size();
  if (n == 0) throw ContractError("no training data");
  const std::size_t per_epoch = (n + batch_size - 1) / batch_size;
  const std::size_t epoch = step / per_epoch;
  num::Rng rng = num::Rng(seed).split(0x6261746368ULL + epoch);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  const std::size_t pool = 4 * batch_size;
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t p = 0; p < n; p += pool) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(p);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(std::min(n, p + pool));
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) { return data[a].frames < data[b].frames; });
    for (auto it = first; it < last; it += static_cast<std::ptrdiff_t>(std::min<std::size_t>(batch_size, last - it))) {
      batches.emplace_back(it, it + static_cast<std::ptrdiff_t>(std::min<std::size_t>(batch_size, last - it)));
    }
  }
  for (std::size_t i = batches.size(); i > 1; --i) std::swap(batches[i - 1], batches[rng.below(i)]);
  return batches[step % per_epoch < batches.size() ? step % per_epoch : 0];
}

Trainer::Trainer(TrainConfig config, std::vector<Example> data, model::Model model)
    : config_(std::move(config)), data_(std::move(data)), model_(std::move(model)) {
  config_.validate();
  if (data_.empty()) throw ContractError("trainer: no training data");
  if (!(model_.config == config_.model)) throw ContractError("trainer: model does not match the configured model");
  const auto& mc = model_.config;
  for (const auto& e : data_) {
    if (e.mel.size() != e.frames * mc.n_mels || e.linear.size() != e.frames * mc.n_linear_bins) {
      throw DimensionError("record " + e.id + ": spectrogram widths do not match the model (n_mels=" +
                           std::to_string(mc.n_mels) + ", n_linear_bins=" + std::to_string(mc.n_linear_bins) + ")");
    }
  }
}

LossReport Trainer::train_step() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t s = step();
  const auto idx = batch_for_step(data_, config_.batch_size, config_.seed, s);
  std::vector<std::vector<int>> texts;
  std::vector<std::vector<double>> mels, lins;
  for (auto i : idx) {
    texts.push_back(data_[i].symbols);
    mels.push_back(data_[i].mel);
    lins.push_back(data_[i].linear);
  }
  num::Rng dropout = num::Rng(config_.seed).split(0x64726f70ULL).split(s);

  model_.params.zero_grad();
  num::Tape tape;
  const auto fwd = model::forward_teacher_forced(tape, model_, texts, mels, model::StyleDirective::none(), &dropout);
  const auto mel_t = model::pack_frames(mels, model_.config.n_mels, fwd.frames);
  model::PackedFrames lin_t;
  if (model_.config.use_postnet) lin_t = model::pack_frames(lins, model_.config.n_linear_bins, fwd.frames);
  const auto loss = reconstruction_loss(tape, fwd.mel, fwd.linear, mel_t, lin_t, config_.w_mel,
                                        model_.config.use_postnet ? config_.w_lin : 0.0);
  const double total = loss.total.item();
  if (!std::isfinite(total)) throw TrainingError("non-finite loss at step " + std::to_string(s));
  tape.backward(loss.total);

  LossReport r;
  r.step = s;
  r.mel_l1 = loss.mel_l1;
  r.lin_l1 = loss.lin_l1;
  r.total = total;
  r.grad_norm = model_.params.clip_grad_norm(config_.grad_clip);
  if (!std::isfinite(r.grad_norm)) throw TrainingError("non-finite gradient at step " + std::to_string(s));
  model_.params.adam_update(config_.adam());
  model_.params.zero_grad();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

model::Model initial_model(const TrainConfig& config) {
  num::Rng rng = num::Rng(config.seed).split(0x696e6974ULL);
  return model::Model::create(config.model, rng, num::StoragePrecision::kFloat32);
}

std::string loss_csv_header() { return "step,mel_l1,lin_l1,total,grad_norm,seconds"; }

std::string loss_csv_row(const LossReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g,%.6f", r.step, r.mel_l1, r.lin_l1, r.total, r.grad_norm,
                r.seconds);
  return buf;
}

FitResult fit(const TrainConfig& config, const fs::path& out_dir, const std::optional<fs::path>& resume,
              const ProgressFn& progress) {
  config.validate();
  if (config.corpus.empty()) throw ContractError("train config: corpus path is empty");
  dsp::AudioConfig audio;
  audio.n_mels = config.model.n_mels;
  auto data = to_examples(corpus::load_training_view(config.corpus), audio);

  model::Model start = resume ? model::load_checkpoint(*resume) : initial_model(config);
  if (resume && !(start.config == config.model)) {
    throw ContractError("checkpoint " + resume->string() + " was trained with a different model config");
  }
  Trainer trainer(config, std::move(data), std::move(start));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  FitResult result;
  result.loss_curve = out_dir / "loss.csv";
  result.final_checkpoint = out_dir / "final.stck";

  std::vector<std::string> kept;
  if (resume) {
    std::ifstream in(result.loss_curve);
    std::string line;
    std::getline(in, line);
    while (kept.size() < trainer.step() && std::getline(in, line)) kept.push_back(line);
  }
  std::ofstream csv(result.loss_curve, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError("cannot open for writing: " + result.loss_curve.string());
  csv << loss_csv_header() << "\n";
  for (const auto& line : kept) csv << line << "\n";

  while (trainer.step() < config.steps) {
    const auto report = trainer.train_step();
    csv << loss_csv_row(report) << "\n";
    csv.flush();
    if (!csv) throw IoError("write failed: " + result.loss_curve.string());
    result.reports.push_back(report);
    if (progress) progress(report);
    if (trainer.step() % config.checkpoint_interval == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "ckpt_%06zu.stck", trainer.step());
      model::save_checkpoint(out_dir / name, trainer.model(), true);
    }
  }
  model::save_checkpoint(result.final_checkpoint, trainer.model(), true);
  return result;
}

}  // namespace styletok::train
