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

#include "foley/model_config.h"

#include <sstream>

#include "foley/errors.h"
#include "foley/event_feature.h"

namespace foley {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(to_int("list", item));
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string cond_mode_name(CondMode m) {
  switch (m) {
    case CondMode::kNone: return "none";
    case CondMode::kFilm: return "film";
    case CondMode::kTfilm: return "tfilm";
    case CondMode::kBfilm: return "bfilm";
  }
  return "?";
}

CondMode parse_cond_mode(const std::string& s) {
  if (s == "none") return CondMode::kNone;
  if (s == "film") return CondMode::kFilm;
  if (s == "tfilm") return CondMode::kTfilm;
  if (s == "bfilm") return CondMode::kBfilm;
  throw ValidationError("unknown cond_mode '" + s + "' (none|film|tfilm|bfilm)");
}

std::string placement_name(TemporalPlacement p) {
  return p == TemporalPlacement::kEveryBlock ? "every-block" : "up-blocks";
}

TemporalPlacement parse_placement(const std::string& s) {
  if (s == "every-block") return TemporalPlacement::kEveryBlock;
  if (s == "up-blocks") return TemporalPlacement::kUpBlocks;
  throw ValidationError("unknown temporal placement '" + s + "' (every-block|up-blocks)");
}

std::string activation_name(nn::Activation a) {
  switch (a) {
    case nn::Activation::kIdentity: return "identity";
    case nn::Activation::kSilu: return "silu";
    case nn::Activation::kTanh: return "tanh";
  }
  return "?";
}

nn::Activation parse_activation(const std::string& s) {
  if (s == "identity") return nn::Activation::kIdentity;
  if (s == "silu") return nn::Activation::kSilu;
  if (s == "tanh") return nn::Activation::kTanh;
  throw ValidationError("unknown activation '" + s + "' (identity|silu|tanh)");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

int ModelConfig::frames() const {
  return static_cast<int>(frame_count(static_cast<std::size_t>(sample_len), feature_window,
                                      feature_hop));
}

int ModelConfig::level_length(int level) const {
  int len = sample_len;
  for (int i = 0; i <= level; ++i) len /= strides[i];
  return len;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("model config: " + m); };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (sample_len <= 0) fail("sample_len must be positive");
  if (channels.empty()) fail("at least one level is required");
  if (channels.size() != strides.size()) fail("channels and strides must have equal length");
  for (int c : channels) {
    if (c < 1) fail("channel widths must be >= 1");
  }
  long prod = 1;
  for (int s : strides) {
    if (s < 1) fail("strides must be >= 1");
    if (s > kernel) fail("kernel must be at least as large as every stride");
    prod *= s;
  }
  if (sample_len % prod != 0) {
    fail("product of strides (" + std::to_string(prod) + ") must divide sample_len (" +
         std::to_string(sample_len) + ")");
  }
  if (kernel < 1 || kernel % 2 == 0) fail("kernel must be odd and >= 1");
  if (bottleneck_hidden < 1) fail("bottleneck_hidden must be >= 1");
  if (class_count < 1) fail("class_count must be >= 1");
  if (!class_names.empty() && static_cast<int>(class_names.size()) != class_count) {
    fail("class_names must list exactly class_count names");
  }
  if (class_embed_dim < 1 || sigma_embed_dim < 2 || sigma_embed_dim % 2 != 0) {
    fail("embedding widths must be positive (sigma_embed_dim even)");
  }
  if (film_hidden < 1 || temporal_hidden < 1) fail("hidden widths must be >= 1");
  if (blocks < 1) fail("blocks must be >= 1");
  if (feature_window < 1 || feature_hop < 1) fail("feature window/hop must be >= 1");
  if (sample_len < feature_window) fail("sample_len shorter than the feature window");
  if (cond_mode == CondMode::kTfilm || cond_mode == CondMode::kBfilm) {
    if (blocks > frames()) {
      fail("blocks (" + std::to_string(blocks) + ") exceeds feature frames (" +
           std::to_string(frames()) + ")");
    }
    if (blocks > level_length(levels() - 1)) fail("blocks exceeds the deepest activation length");
  }
}

std::string ModelConfig::to_text() const {
  std::ostringstream out;
  std::string names;
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (i) names += ',';
    names += class_names[i];
  }
  out << "sample_rate = " << sample_rate << "\n"
      << "sample_len = " << sample_len << "\n"
      << "channels = " << join_ints(channels) << "\n"
      << "strides = " << join_ints(strides) << "\n"
      << "kernel = " << kernel << "\n"
      << "bottleneck_hidden = " << bottleneck_hidden << "\n"
      << "class_count = " << class_count << "\n"
      << "class_names = " << names << "\n"
      << "class_embed_dim = " << class_embed_dim << "\n"
      << "sigma_embed_dim = " << sigma_embed_dim << "\n"
      << "film_hidden = " << film_hidden << "\n"
      << "temporal_hidden = " << temporal_hidden << "\n"
      << "cond_mode = " << cond_mode_name(cond_mode) << "\n"
      << "placement = " << placement_name(placement) << "\n"
      << "blocks = " << blocks << "\n"
      << "feature_window = " << feature_window << "\n"
      << "feature_hop = " << feature_hop << "\n"
      << "activation = " << activation_name(activation) << "\n"
      << "init_seed = " << init_seed << "\n";
  return out.str();
}

void ModelConfig::apply(const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "sample_rate") sample_rate = to_int(k, v);
    else if (k == "sample_len") sample_len = to_int(k, v);
    else if (k == "channels") channels = parse_int_list(v);
    else if (k == "strides") strides = parse_int_list(v);
    else if (k == "kernel") kernel = to_int(k, v);
    else if (k == "bottleneck_hidden") bottleneck_hidden = to_int(k, v);
    else if (k == "class_count") class_count = to_int(k, v);
    else if (k == "class_names") class_names = split_list(v);
    else if (k == "class_embed_dim") class_embed_dim = to_int(k, v);
    else if (k == "sigma_embed_dim") sigma_embed_dim = to_int(k, v);
    else if (k == "film_hidden") film_hidden = to_int(k, v);
    else if (k == "temporal_hidden") temporal_hidden = to_int(k, v);
    else if (k == "cond_mode") cond_mode = parse_cond_mode(v);
    else if (k == "placement") placement = parse_placement(v);
    else if (k == "blocks") blocks = to_int(k, v);
    else if (k == "feature_window") feature_window = to_int(k, v);
    else if (k == "feature_hop") feature_hop = to_int(k, v);
    else if (k == "activation") activation = parse_activation(v);
    else if (k == "init_seed") init_seed = std::stoull(v);
    else throw ValidationError("unknown model config key '" + k + "'");
  }
}

ModelConfig ModelConfig::from_text(const std::string& text) {
  ModelConfig cfg;
  cfg.apply(parse_key_values(text));
  cfg.validate();
  return cfg;
}

ModelConfig ModelConfig::paper_scale() {
  ModelConfig cfg;
  cfg.sample_rate = 22050;
  cfg.sample_len = 88200;
  cfg.strides = {2, 2, 2, 3};
  cfg.channels = {16, 32, 64, 128};
  cfg.class_count = 7;
  cfg.class_names = {"DogBark", "Footstep", "GunShot", "Keyboard",
                     "MovingMotorVehicle", "Rain", "Sneeze_Cough"};
  cfg.feature_window = 512;
  cfg.feature_hop = 128;
  cfg.blocks = 49;
  return cfg;
}

ModelConfig ModelConfig::tiny() {
  ModelConfig cfg;
  cfg.sample_rate = 1000;
  cfg.sample_len = 64;
  cfg.channels = {4, 4};
  cfg.strides = {2, 2};
  cfg.kernel = 3;
  cfg.bottleneck_hidden = 3;
  cfg.class_count = 2;
  cfg.class_names = {"a", "b"};
  cfg.class_embed_dim = 3;
  cfg.sigma_embed_dim = 4;
  cfg.film_hidden = 5;
  cfg.temporal_hidden = 4;
  cfg.blocks = 4;
  cfg.feature_window = 16;
  cfg.feature_hop = 8;
  return cfg;
}

}  // namespace foley
