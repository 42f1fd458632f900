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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "styletok/corpus/dataset.hpp"
#include "styletok/error.hpp"
#include "styletok/model/checkpoint.hpp"
#include "styletok/train/trainer.hpp"

namespace styletok::train {
namespace {

namespace fs = std::filesystem;
using num::Tape;
using num::Tensor;

model::ModelConfig small_model() {
  model::ModelConfig c;
  c.n_tokens = 3;
  c.d_tok = c.d_txt = c.d_enc = c.d_att = c.d_dec = 16;
  c.prenet1 = c.prenet2 = 16;
  c.d_post = 8;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("styletok_trainer_" + name);
  fs::remove_all(p);
  return p;
}

const fs::path& shared_corpus() {
  static const fs::path dir = [] {
    const fs::path d = scratch("corpus");
    corpus::build_corpus(12, 7, d);
    return d;
  }();
  return dir;
}

TrainConfig small_config() {
  TrainConfig c;
  c.model = small_model();
  c.batch_size = 4;
  c.steps = 6;
  c.checkpoint_interval = 3;
  c.corpus = shared_corpus().string();
  return c;
}

std::vector<Example> small_data() {
  return to_examples(corpus::load_training_view(shared_corpus()), dsp::AudioConfig{});
}

std::vector<double> flat_params(const model::Model& m) {
  std::vector<double> out;
  for (const auto& n : m.params.names()) {
    const auto v = m.params.get(n).values();
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string without_seconds(const std::string& row) { return row.substr(0, row.rfind(',')); }

TEST(TrainConfigParse, EmptyObjectGivesDefaults) {
  const TrainConfig c = parse_train_config("{}");
  EXPECT_EQ(c.steps, 2000u);
  EXPECT_EQ(c.batch_size, 8u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.model, model::ModelConfig{});
}

TEST(TrainConfigParse, OverridesNestedModelFields) {
  const TrainConfig c =
      parse_train_config(R"({"steps": 10, "w_lin": 0.5, "model": {"n_tokens": 4, "gates": "complementary"}})");
  EXPECT_EQ(c.steps, 10u);
  EXPECT_DOUBLE_EQ(c.w_lin, 0.5);
  EXPECT_EQ(c.model.n_tokens, 4u);
  EXPECT_EQ(c.model.gates, model::GateMode::kComplementary);
}

TEST(TrainConfigParse, RejectsBadInput) {
  EXPECT_THROW(parse_train_config(R"({"stepz": 3})"), ContractError);
  EXPECT_THROW(parse_train_config(R"({"model": {"n_token": 3}})"), ContractError);
  EXPECT_THROW(parse_train_config(R"({"steps": "many"})"), ContractError);
  EXPECT_THROW(parse_train_config(R"({"model": {"gates": "both"}})"), ContractError);
  EXPECT_THROW(parse_train_config(R"({"batch_size": 0})"), ContractError);
  EXPECT_THROW(parse_train_config(R"({"lr_schedule": "cosine"})"), ContractError);
  EXPECT_THROW(parse_train_config(R"({"model": {"use_postnet": false}})"), ContractError);
  EXPECT_NO_THROW(parse_train_config(R"({"w_lin": 0, "model": {"use_postnet": false}})"));
  EXPECT_THROW(parse_train_config("[1, 2]"), ContractError);
  EXPECT_THROW(parse_train_config("{"), ContractError);
}

model::PackedFrames packed(std::vector<std::vector<double>> items, std::size_t width, std::size_t frames) {
  return model::pack_frames(items, width, frames);
}

TEST(ReconstructionLoss, ZeroWhenPredictionMatches) {
  const auto mel = packed({{0.1, 0.2, 0.3, 0.4}, {0.5, 0.6}}, 2, 2);
  const auto lin = packed({{0.7, 0.8, 0.9, 1.0, 0.1, 0.2}, {0.3, 0.4, 0.5}}, 3, 2);
  Tape tape;
  const auto l = reconstruction_loss(tape, mel.values.clone(), lin.values.clone(), mel, lin, 1.0, 1.0);
  EXPECT_EQ(l.total.item(), 0.0);
  EXPECT_EQ(l.mel_l1, 0.0);
  EXPECT_EQ(l.lin_l1, 0.0);
}

TEST(ReconstructionLoss, WeightedSumOfMeanAbsoluteErrors) {
  const auto mel = packed({{0, 0, 0, 0}, {0, 0}}, 2, 2);
  const auto lin = packed({{0, 0, 0}}, 3, 1);
  // Valid mel cells: 6; |err| = 0.5 everywhere.
  const Tensor pm = Tensor::filled({4, 2}, 0.5);
  const Tensor pl = Tensor::filled({1, 3}, -2.0);
  for (double wm : {1.0, 0.25}) {
    for (double wl : {0.0, 1.0, 3.0}) {
      Tape tape;
      const auto l = reconstruction_loss(tape, pm, pl, mel, lin, wm, wl);
      EXPECT_NEAR(l.mel_l1, 0.5, 1e-12);
      EXPECT_NEAR(l.lin_l1, 2.0, 1e-12);
      EXPECT_NEAR(l.total.item(), wm * 0.5 + wl * 2.0, 1e-12);
    }
  }
}

TEST(ReconstructionLoss, IgnoresPaddedFrames) {
  const auto mel = packed({{0.2, 0.4, 0.6, 0.8}, {0.1, 0.3}}, 2, 2);
  num::Rng rng(3);
  std::vector<double> a(mel.values.numel()), b;
  for (auto& x : a) x = rng.uniform(0, 1);
  b = a;
  // Rows are time-major: row 3 is frame 1 of the one-frame item.
  const auto& shape = mel.values.shape();
  for (std::size_t c = 0; c < 2; ++c) b[3 * 2 + c] = 100.0;
  Tape tape;
  const Tensor none;
  const double la = reconstruction_loss(tape, Tensor(shape, a), none, mel, {}, 1.0, 0.0).total.item();
  const double lb = reconstruction_loss(tape, Tensor(shape, b), none, mel, {}, 1.0, 0.0).total.item();
  EXPECT_EQ(la, lb);
}

TEST(ReconstructionLoss, RejectsMismatchedInputs) {
  const auto mel = packed({{0, 0, 0, 0}}, 2, 2);
  Tape tape;
  EXPECT_THROW(reconstruction_loss(tape, Tensor::zeros({2, 3}), Tensor(), mel, {}, 1.0, 0.0), DimensionError);
  EXPECT_THROW(reconstruction_loss(tape, Tensor::zeros({2, 2}), Tensor(), mel, {}, 1.0, 1.0), ContractError);
}

TEST(Batching, EachEpochVisitsEveryExampleOnce) {
  const auto data = small_data();
  ASSERT_EQ(data.size(), 12u);
  for (std::size_t epoch = 0; epoch < 3; ++epoch) {
    std::multiset<std::size_t> seen;
    for (std::size_t s = 0; s < 3; ++s) {
      const auto b = batch_for_step(data, 4, 7, epoch * 3 + s);
      EXPECT_EQ(b.size(), 4u);
      seen.insert(b.begin(), b.end());
    }
    EXPECT_EQ(seen.size(), 12u);
    EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), 12u);
  }
  EXPECT_EQ(batch_for_step(data, 4, 7, 5), batch_for_step(data, 4, 7, 5));
  EXPECT_NE(batch_for_step(data, 4, 7, 0), batch_for_step(data, 4, 8, 0));
}

TEST(Batching, RaggedLastBatch) {
  const auto data = small_data();
  std::multiset<std::size_t> seen;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto b = batch_for_step(data, 5, 1, s);
    seen.insert(b.begin(), b.end());
  }
  EXPECT_EQ(seen.size(), 12u);
}

TEST(Trainer, RejectsWidthMismatch) {
  TrainConfig c = small_config();
  c.model.n_mels = 20;
  EXPECT_THROW(Trainer(c, small_data(), initial_model(c)), DimensionError);
}

TEST(Trainer, StepsAreDeterministic) {
  const TrainConfig c = small_config();
  Trainer a(c, small_data(), initial_model(c));
  Trainer b(c, small_data(), initial_model(c));
  for (int i = 0; i < 3; ++i) {
    const auto ra = a.train_step();
    const auto rb = b.train_step();
    EXPECT_EQ(ra.total, rb.total);
    EXPECT_EQ(ra.grad_norm, rb.grad_norm);
  }
  EXPECT_EQ(a.step(), 3u);
  EXPECT_EQ(flat_params(a.model()), flat_params(b.model()));
}

TEST(Trainer, EveryParameterMoves) {
  TrainConfig c = small_config();
  Trainer t(c, small_data(), initial_model(c));
  const model::Model before = initial_model(c);
  t.train_step();
  for (const auto& name : before.params.names()) {
    const auto x = before.params.get(name).values();
    const auto y = t.model().params.get(name).values();
    bool moved = false;
    for (std::size_t i = 0; i < x.size(); ++i) moved |= x[i] != y[i];
    EXPECT_TRUE(moved) << name;
  }
}

TEST(Trainer, ReportsPreClipNormAndClips) {
  TrainConfig c = small_config();
  c.grad_clip = 1e-6;
  c.learning_rate = 1e-12;
  Trainer t(c, small_data(), initial_model(c));
  const auto r = t.train_step();
  EXPECT_GT(r.grad_norm, 1e-6);
  EXPECT_TRUE(std::isfinite(r.total));
  EXPECT_GE(r.seconds, 0.0);
}

TEST(Trainer, GradNormIsNormOfAllGradients) {
  TrainConfig c = small_config();
  c.grad_clip = 1e9;
  const auto data = small_data();
  model::Model m = initial_model(c);

  // Same step-0 batch through the public pieces, without the optimizer.
  std::vector<std::vector<int>> texts;
  std::vector<std::vector<double>> mels, lins;
  for (auto i : batch_for_step(data, c.batch_size, c.seed, 0)) {
    texts.push_back(data[i].symbols);
    mels.push_back(data[i].mel);
    lins.push_back(data[i].linear);
  }
  Tape tape;
  const auto fwd = model::forward_teacher_forced(tape, m, texts, mels);
  const auto loss = reconstruction_loss(tape, fwd.mel, fwd.linear, model::pack_frames(mels, 40, fwd.frames),
                                        model::pack_frames(lins, 257, fwd.frames), c.w_mel, c.w_lin);
  tape.backward(loss.total);
  double sq = 0.0;
  for (const auto& name : m.params.names()) {
    const auto& p = m.params.get(name);
    if (!p.has_grad()) continue;
    for (double g : p.grad()) sq += g * g;
  }

  Trainer t(c, data, initial_model(c));
  const auto r = t.train_step();
  EXPECT_NEAR(r.grad_norm, std::sqrt(sq), 1e-5 * std::sqrt(sq));
  EXPECT_NEAR(r.total, r.mel_l1 * c.w_mel + r.lin_l1 * c.w_lin, 1e-6);
  EXPECT_EQ(r.total, loss.total.item());
}

TEST(Trainer, TokenBankReceivesGradientAtInit) {
  TrainConfig c = small_config();
  const auto data = small_data();
  model::Model m = initial_model(c);
  std::vector<std::vector<int>> texts;
  std::vector<std::vector<double>> mels;
  for (auto i : batch_for_step(data, c.batch_size, c.seed, 0)) {
    texts.push_back(data[i].symbols);
    mels.push_back(data[i].mel);
  }
  Tape tape;
  const auto fwd = model::forward_teacher_forced(tape, m, texts, mels);
  tape.backward(num::l1_loss(tape, fwd.mel, model::pack_frames(mels, 40, fwd.frames).values,
                             model::pack_frames(mels, 40, fwd.frames).mask));
  const auto& bank = m.params.get("style.tokens");
  ASSERT_TRUE(bank.has_grad());
  double norm = 0.0;
  for (double g : bank.grad()) norm += g * g;
  EXPECT_GT(norm, 0.0);
}

TEST(Trainer, NonFiniteLossNamesTheStep) {
  TrainConfig c = small_config();
  model::Model m = initial_model(c);
  m.params.get("head.b").mutable_values()[0] = std::nan("");
  Trainer t(c, small_data(), std::move(m));
  try {
    t.train_step();
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("step 0"), std::string::npos) << e.what();
  }
}

TEST(Trainer, LossFallsOnSmallCorpus) {
  TrainConfig c = small_config();
  c.learning_rate = 3e-3;
  Trainer t(c, small_data(), initial_model(c));
  double first = 0, last = 0;
  for (int i = 0; i < 120; ++i) {
    const auto r = t.train_step();
    if (i < 3) first += r.mel_l1;
    if (i >= 117) last += r.mel_l1;
  }
  EXPECT_LT(last, 0.7 * first);
}

TEST(Trainer, TwoHundredStepsOnSixtyFourUtterances) {
  const fs::path dir = scratch("corpus64");
  corpus::build_corpus(64, 7, dir);
  TrainConfig c = small_config();
  c.corpus = dir.string();
  c.batch_size = 8;
  Trainer t(c, to_examples(corpus::load_training_view(dir), dsp::AudioConfig{}), initial_model(c));
  const auto first = t.train_step();
  LossReport last;
  for (int i = 1; i < 200; ++i) last = t.train_step();
  EXPECT_EQ(last.step, 199u);
  EXPECT_LT(last.total, first.total);
  EXPECT_LT(last.mel_l1, first.mel_l1);
}

TEST(Fit, WritesCurveAndCheckpoints) {
  const TrainConfig c = small_config();
  const fs::path out = scratch("fit");
  const auto result = fit(c, out);
  const auto rows = lines_of(result.loss_curve);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], loss_csv_header());
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
  EXPECT_EQ(result.reports.size(), 6u);
  EXPECT_TRUE(fs::exists(out / "ckpt_000003.stck"));
  EXPECT_TRUE(fs::exists(out / "ckpt_000006.stck"));
  EXPECT_TRUE(fs::exists(result.final_checkpoint));
  EXPECT_EQ(model::load_checkpoint(result.final_checkpoint).params.step(), 6u);
}

TEST(Fit, ResumeMatchesUninterruptedRun) {
  const TrainConfig c = small_config();
  const fs::path full = scratch("full");
  const fs::path part = scratch("part");
  fit(c, full);
  TrainConfig half = c;
  half.steps = 3;
  fit(half, part);
  fit(c, part, part / "ckpt_000003.stck");

  const auto a = model::load_checkpoint(full / "final.stck");
  const auto b = model::load_checkpoint(part / "final.stck");
  EXPECT_EQ(flat_params(a), flat_params(b));
  for (const auto& n : a.params.names()) {
    EXPECT_EQ(a.params.first_moment(n), b.params.first_moment(n)) << n;
    EXPECT_EQ(a.params.second_moment(n), b.params.second_moment(n)) << n;
  }
  const auto ra = lines_of(full / "loss.csv");
  const auto rb = lines_of(part / "loss.csv");
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(without_seconds(ra[i]), without_seconds(rb[i]));
}

TEST(Fit, RejectsCheckpointFromOtherModel) {
  TrainConfig c = small_config();
  const fs::path out = scratch("other");
  TrainConfig other = c;
  other.model.n_tokens = 4;
  other.steps = 3;
  fit(other, out);
  EXPECT_THROW(fit(c, out / "resumed", out / "final.stck"), ContractError);
}

}  // namespace
}  // namespace styletok::train
