// Copyright (c) 2026 The foleysynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOLEY_TOOLS_COMMANDS_H_
#define FOLEY_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "foley/diffusion.h"
#include "foley/model_config.h"
#include "foley/trainer.h"

namespace foley::cli {

struct Globals {
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
};

// Model settings shared by train, sweep-blocks and describe. Unset optionals
// leave the preset's value.
struct ModelFlags {
  std::string preset = "toy";
  std::optional<std::string> cond_mode;
  std::optional<std::string> placement;
  std::optional<int> blocks;
  std::optional<std::string> channels;
  std::optional<std::string> strides;
  std::optional<int> kernel;
  std::optional<int> feature_window;
  std::optional<int> feature_hop;
  std::vector<std::string> set;  // raw key=value overrides

  ModelConfig build() const;
};

struct CorpusFlags {
  std::optional<std::filesystem::path> corpus;
  int per_class = 200;
  double val_fraction = 0.05;
};

struct ExtractArgs {
  std::filesystem::path audio;
  int window = kDefaultWindow;
  int hop = kDefaultHop;
  double gain = 1.0;
  std::filesystem::path output;
};

struct SynthArgs {
  int per_class = 200;
  int sample_rate = 8000;
  double duration = 1.0;
};

struct TrainArgs {
  ModelFlags model;
  CorpusFlags corpus;
  TrainConfig train;
  std::optional<std::filesystem::path> resume;
};

struct GenerateArgs {
  std::filesystem::path checkpoint;
  std::optional<std::string> class_name;
  std::optional<std::filesystem::path> condition;
  std::optional<std::filesystem::path> from_audio;
  std::optional<std::string> name;
  double gain = 1.0;
  int count = 1;
  SamplerConfig sampler;
};

struct EvalArgs {
  std::filesystem::path generated;
  std::filesystem::path reference;
  int window = kDefaultWindow;
  int hop = kDefaultHop;
  std::optional<std::filesystem::path> gen_embeddings;
  std::optional<std::filesystem::path> ref_embeddings;
  std::optional<std::filesystem::path> probs;
  int splits = 1;
};

struct SweepArgs {
  ModelFlags model;
  CorpusFlags corpus;
  TrainConfig train;
  std::string blocks = "4,8,16,32,64";
  std::optional<std::filesystem::path> base;
  int eval_count = 12;
  int steps = 50;
  double guidance = 2.0;
};

struct DescribeArgs {
  ModelFlags model;
  std::optional<std::filesystem::path> checkpoint;
};

void cmd_extract(const Globals& g, const ExtractArgs& a);
void cmd_synth_corpus(const Globals& g, const SynthArgs& a);
void cmd_train(const Globals& g, const TrainArgs& a);
void cmd_generate(const Globals& g, const GenerateArgs& a);
void cmd_eval(const Globals& g, const EvalArgs& a);
void cmd_sweep_blocks(const Globals& g, const SweepArgs& a);
void cmd_describe(const Globals& g, const DescribeArgs& a);

}  // namespace foley::cli

#endif  // FOLEY_TOOLS_COMMANDS_H_
