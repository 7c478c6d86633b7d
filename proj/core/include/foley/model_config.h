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

#ifndef FOLEY_MODEL_CONFIG_H_
#define FOLEY_MODEL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "foley/nn/ops.h"

namespace foley {

enum class CondMode { kNone, kFilm, kTfilm, kBfilm };

// Where temporal modulation is applied inside the U-Net.
//   kEveryBlock: second conv of every Down and Up block.
//   kUpBlocks:   second conv of Up blocks only (the decoder half).
enum class TemporalPlacement { kEveryBlock, kUpBlocks };

// Every architecture knob of the noise-prediction network.
struct ModelConfig {
  int sample_rate = 8000;
  int sample_len = 8000;
  std::vector<int> channels{16, 32, 64, 128};
  std::vector<int> strides{2, 2, 2, 2};
  int kernel = 5;
  int bottleneck_hidden = 64;
  int class_count = 3;
  std::vector<std::string> class_names{"impact", "steps", "rain"};
  int class_embed_dim = 16;
  int sigma_embed_dim = 16;
  int film_hidden = 64;
  int temporal_hidden = 32;
  CondMode cond_mode = CondMode::kBfilm;
  TemporalPlacement placement = TemporalPlacement::kEveryBlock;
  int blocks = 16;
  int feature_window = 256;
  int feature_hop = 64;
  nn::Activation activation = nn::Activation::kSilu;
  std::uint64_t init_seed = 1;

  int levels() const { return static_cast<int>(channels.size()); }
  // Frames of the temporal event feature for one sample_len clip.
  int frames() const;
  // Activation length after Down block `level` (0-based).
  int level_length(int level) const;

  // Throws ValidationError describing the first violated invariant.
  void validate() const;

  // Key-value text, one "key = value" per line, stable key order.
  std::string to_text() const;
  static ModelConfig from_text(const std::string& text);
  // Applies the recognised keys of a parsed key-value map on top of *this.
  void apply(const std::map<std::string, std::string>& kv);

  // Paper-scale geometry: 4 s at 22.05 kHz, seven classes, W=512, h=128, N=49.
  static ModelConfig paper_scale();
  // Tiny config for full-model gradient checks.
  static ModelConfig tiny();
};

std::string cond_mode_name(CondMode m);
CondMode parse_cond_mode(const std::string& s);
std::string placement_name(TemporalPlacement p);
TemporalPlacement parse_placement(const std::string& s);
std::string activation_name(nn::Activation a);
nn::Activation parse_activation(const std::string& s);

// Parses "key = value" lines; '#' starts a comment. Section headers are
// ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);

std::vector<int> parse_int_list(const std::string& s);
std::string join_ints(const std::vector<int>& v);

}  // namespace foley

#endif  // FOLEY_MODEL_CONFIG_H_
