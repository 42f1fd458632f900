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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "styletok/corpus/dataset.hpp"
#include "styletok/dsp/audio_config.hpp"
#include "styletok/model/model.hpp"

namespace styletok::train {

struct TrainConfig {
  std::size_t steps = 2000;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::string lr_schedule = "constant";
  double grad_clip = 1.0;
  double w_mel = 1.0;
  double w_lin = 1.0;
  std::uint64_t seed = 7;
  std::size_t checkpoint_interval = 500;
  std::string corpus;
  model::ModelConfig model;

  void validate() const;
  num::AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }
};

// Parses JSON holding only TrainConfig fields; "model" may override
// individual ModelConfig fields. Unknown keys throw ContractError.
TrainConfig parse_train_config(const std::string& json_text);
TrainConfig load_train_config(const std::filesystem::path& path);

struct LossReport {
  std::size_t step = 0;
  double mel_l1 = 0.0;
  double lin_l1 = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;
};

struct LossTerms {
  num::Tensor total;
  double mel_l1 = 0.0;
  double lin_l1 = 0.0;
};

// total = w_mel * masked L1(mel) + w_lin * masked L1(linear). Pass an
// undefined pred_lin (and w_lin = 0) for a model without post-net.
LossTerms reconstruction_loss(num::Tape& tape, const num::Tensor& pred_mel, const num::Tensor& pred_lin,
                              const model::PackedFrames& mel_target, const model::PackedFrames& lin_target,
                              double w_mel, double w_lin);

// One utterance in model units: levels in [0, 1], frames x bins row-major.
struct Example {
  std::string id;
  std::vector<int> symbols;
  std::vector<double> mel;
  std::vector<double> linear;
  std::size_t frames = 0;
};

std::vector<Example> to_examples(const std::vector<corpus::TrainingRecord>& records, const dsp::AudioConfig& audio);

// Indices of the utterances in batch `step`. Batches come from per-epoch
// shuffles: pools of four batches are sorted by length and cut into
// batches, then the batch order is shuffled. A pure function of
// (seed, step).
std::vector<std::size_t> batch_for_step(const std::vector<Example>& data, std::size_t batch_size, std::uint64_t seed,
                                        std::size_t step);

class Trainer {
 public:
  Trainer(TrainConfig config, std::vector<Example> data, model::Model model);

  // Forward, backward, clip and one Adam update for batch number step().
  LossReport train_step();

  std::size_t step() const { return static_cast<std::size_t>(model_.params.step()); }
  const model::Model& model() const { return model_; }
  model::Model& model() { return model_; }
  const TrainConfig& config() const { return config_; }

 private:
  TrainConfig config_;
  std::vector<Example> data_;
  model::Model model_;
};

model::Model initial_model(const TrainConfig& config);

struct FitResult {
  std::filesystem::path final_checkpoint;
  std::filesystem::path loss_curve;
  std::vector<LossReport> reports;
};

using ProgressFn = std::function<void(const LossReport&)>;

// Trains to config.steps, writing <out>/loss.csv, <out>/ckpt_<step>.stck at
// every checkpoint interval and <out>/final.stck. With `resume`, training
// continues from that checkpoint's optimizer step and loss.csv keeps the
// rows before it.
FitResult fit(const TrainConfig& config, const std::filesystem::path& out_dir,
              const std::optional<std::filesystem::path>& resume = std::nullopt, const ProgressFn& progress = {});

std::string loss_csv_header();
std::string loss_csv_row(const LossReport& r);

}  // namespace styletok::train
