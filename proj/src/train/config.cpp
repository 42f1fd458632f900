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

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "styletok/error.hpp"
#include "styletok/train/trainer.hpp"

namespace styletok::train {

using nlohmann::json;

void TrainConfig::validate() const {
  if (steps == 0) throw ContractError("train config: steps must be positive");
  if (batch_size == 0) throw ContractError("train config: batch_size must be positive");
  if (checkpoint_interval == 0) throw ContractError("train config: checkpoint_interval must be positive");
  if (!(learning_rate > 0)) throw ContractError("train config: learning_rate must be positive");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1)) {
    throw ContractError("train config: Adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0)) throw ContractError("train config: adam_eps must be positive");
  if (!(grad_clip > 0)) throw ContractError("train config: grad_clip must be positive");
  if (!(w_mel > 0)) throw ContractError("train config: w_mel must be > 0");
  if (!(w_lin >= 0)) throw ContractError("train config: w_lin must be >= 0");
  if (!model.use_postnet && w_lin != 0) throw ContractError("train config: w_lin must be 0 without a post-net");
  if (lr_schedule != "constant") throw ContractError("train config: unsupported lr_schedule '" + lr_schedule + "'");
  model.validate();
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ContractError(std::string("train config: field '") + key + "' has the wrong type");
  }
}

void parse_model(const json& j, model::ModelConfig& m) {
  if (!j.is_object()) throw ContractError("train config: 'model' must be an object");
  for (const auto& [key, value] : j.items()) {
    std::size_t* sizes[] = {&m.alphabet, &m.n_tokens, &m.d_tok,   &m.d_txt,         &m.d_enc,
                            &m.d_att,    &m.d_dec,    &m.r,       &m.n_mels,        &m.n_linear_bins,
                            &m.prenet1,  &m.prenet2,  &m.d_post};
    const char* size_names[] = {"alphabet", "n_tokens", "d_tok",  "d_txt",         "d_enc",
                                "d_att",    "d_dec",    "r",      "n_mels",        "n_linear_bins",
                                "prenet1",  "prenet2",  "d_post"};
    bool matched = false;
    for (std::size_t i = 0; i < std::size(sizes); ++i) {
      if (key == size_names[i]) {
        read(j, size_names[i], *sizes[i]);
        matched = true;
      }
    }
    if (matched) continue;
    if (key == "use_postnet") {
      read(j, "use_postnet", m.use_postnet);
    } else if (key == "prenet_dropout") {
      read(j, "prenet_dropout", m.prenet_dropout);
    } else if (key == "silence_threshold") {
      read(j, "silence_threshold", m.silence_threshold);
    } else if (key == "gates") {
      std::string g;
      read(j, "gates", g);
      if (g == "independent") {
        m.gates = model::GateMode::kIndependent;
      } else if (g == "complementary") {
        m.gates = model::GateMode::kComplementary;
      } else {
        throw ContractError("train config: gates must be 'independent' or 'complementary'");
      }
    } else {
      throw ContractError("train config: unknown model key '" + key + "'");
    }
  }
}

}  // namespace

TrainConfig parse_train_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ContractError(std::string("train config: ") + e.what());
  }
  if (!j.is_object()) throw ContractError("train config: top level must be an object");
  TrainConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "steps") read(j, "steps", c.steps);
    else if (key == "batch_size") read(j, "batch_size", c.batch_size);
    else if (key == "learning_rate") read(j, "learning_rate", c.learning_rate);
    else if (key == "adam_beta1") read(j, "adam_beta1", c.adam_beta1);
    else if (key == "adam_beta2") read(j, "adam_beta2", c.adam_beta2);
    else if (key == "adam_eps") read(j, "adam_eps", c.adam_eps);
    else if (key == "lr_schedule") read(j, "lr_schedule", c.lr_schedule);
    else if (key == "grad_clip") read(j, "grad_clip", c.grad_clip);
    else if (key == "w_mel") read(j, "w_mel", c.w_mel);
    else if (key == "w_lin") read(j, "w_lin", c.w_lin);
    else if (key == "seed") read(j, "seed", c.seed);
    else if (key == "checkpoint_interval") read(j, "checkpoint_interval", c.checkpoint_interval);
    else if (key == "corpus") read(j, "corpus", c.corpus);
    else if (key == "model") parse_model(value, c.model);
    else throw ContractError("train config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_train_config(ss.str());
}

}  // namespace styletok::train
