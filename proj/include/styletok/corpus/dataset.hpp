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
#include <string>
#include <vector>

#include "styletok/corpus/render.hpp"
#include "styletok/corpus/spg.hpp"

namespace styletok::corpus {

struct CorpusOptions {
  RenderOptions render;
  std::vector<StyleClass> styles = default_styles();
  std::vector<double> weights = default_style_weights();
  std::size_t min_len = 3;
  std::size_t max_len = 8;
};

struct PlannedUtterance {
  std::string id;
  std::vector<int> symbols;
  int style_id = 0;
};

int draw_style(num::Rng& rng, const std::vector<double>& weights);

// Text and style for every utterance, without rendering. Utterance i draws
// from split i of the seeded generator.
std::vector<PlannedUtterance> plan_corpus(std::size_t n, std::uint64_t seed, const CorpusOptions& opts = {});

struct ManifestRecord {
  std::string id;
  std::vector<int> symbols;
  int style_id = 0;
  std::size_t frames = 0;
  std::size_t voiced_frames = 0;
  std::string wav, lin, mel;
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  std::vector<StyleClass> styles;
  std::vector<double> weights;
  std::vector<ManifestRecord> records;
};

// Writes manifest.jsonl (with labels), train.jsonl (without), corpus.json,
// wav/<id>.wav and spec/<id>.{lin,mel}.
DatasetManifest build_corpus(std::size_t n, std::uint64_t seed, const std::filesystem::path& dir,
                             const CorpusOptions& opts = {});

DatasetManifest load_manifest(const std::filesystem::path& dir);

// Throws IoError naming the first missing file or mismatched frame count.
void verify_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest);

// What the trainer sees: no style label.
struct TrainingRecord {
  std::string id;
  std::vector<int> symbols;
  SpgMatrix mel;
  SpgMatrix linear;
};

std::vector<TrainingRecord> load_training_view(const std::filesystem::path& dir);

}  // namespace styletok::corpus
