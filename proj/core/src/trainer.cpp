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

#include "foley/trainer.h"

#include <sstream>

#include "foley/binary_io.h"
#include "foley/nn/checkpoint.h"

namespace foley {

namespace fs = std::filesystem;

void TrainConfig::validate() const {
  if (!(cond_drop_p >= 0.0 && cond_drop_p <= 1.0)) {
    throw DomainError("cond_drop_p must lie in [0, 1]");
  }
  if (epochs < 0) throw DomainError("epochs must be >= 0");
  if (batch < 1) throw DomainError("batch must be >= 1");
  if (!(adam.lr > 0.0)) throw DomainError("learning rate must be positive");
}

std::string TrainConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "cond_drop_p = " << cond_drop_p << "\n"
      << "epochs = " << epochs << "\n"
      << "batch = " << batch << "\n"
      << "lr = " << adam.lr << "\n"
      << "clip_norm = " << adam.clip_norm << "\n"
      << "train_seed = " << seed << "\n";
  return out.str();
}

void TrainConfig::apply(const std::map<std::string, std::string>& kv) {
  auto get = [&kv](const char* k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (auto* v = get("cond_drop_p")) cond_drop_p = std::stod(*v);
    if (auto* v = get("epochs")) epochs = std::stoi(*v);
    if (auto* v = get("batch")) batch = std::stoi(*v);
    if (auto* v = get("lr")) adam.lr = std::stod(*v);
    if (auto* v = get("clip_norm")) adam.clip_norm = std::stod(*v);
    if (auto* v = get("train_seed")) seed = std::stoull(*v);
  } catch (const std::logic_error&) {
    throw ValidationError("malformed training setting");
  }
}

Trainer::Trainer(UNet<float>& model, TrainConfig cfg)
    : model_(model), cfg_(cfg), adam_(model.params(), cfg.adam), rng_(cfg.seed) {
  cfg_.validate();
}

EpochStats Trainer::train_epoch(BatchStream& stream) {
  const ModelConfig& mc = model_.config();
  stream.start_epoch(rng_);
  EpochStats stats;
  double total = 0.0;
  Batch batch;
  std::vector<Tensor<float>> xs;
  std::vector<Tensor<float>> fs;
  std::vector<TrainExample<float>> examples;
  while (stream.next(batch)) {
    xs.assign(batch.size(), Tensor<float>(1, mc.sample_len));
    fs.clear();
    examples.clear();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Waveform& w = batch.clips[i]->wave;
      validate_training_format(w, mc.sample_rate, static_cast<std::size_t>(mc.sample_len));
      for (std::size_t k = 0; k < w.samples.size(); ++k) {
        xs[i].data[k] = static_cast<float>(w.samples[k]);
      }
      fs.push_back(feature_tensor(*batch.features[i], mc));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      examples.push_back({&xs[i], batch.clips[i]->class_id, &fs[i]});
    }
    model_.params().zero_grad();
    total += training_step<float>(model_, std::span<const TrainExample<float>>(examples),
                                  cfg_.cond_drop_p, rng_);
    adam_.step();
    ++stats.steps;
  }
  ++epoch_;
  stats.epoch = epoch_;
  stats.mean_loss = stats.steps > 0 ? total / static_cast<double>(stats.steps) : 0.0;
  return stats;
}

void save_model(const UNet<float>& model, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nn::save_arrays(dir / "params.fck", nn::export_params(model.params()));
  bin::write_text_file(dir / "config.txt", model.config().to_text());
}

std::unique_ptr<UNet<float>> load_model(const fs::path& dir) {
  const ModelConfig cfg = ModelConfig::from_text(bin::read_text_file(dir / "config.txt"));
  auto model = std::make_unique<UNet<float>>(cfg);
  nn::import_params(model->params(), nn::load_arrays(dir / "params.fck"));
  return model;
}

void Trainer::save(const fs::path& dir) const {
  save_model(model_, dir);
  nn::save_arrays(dir / "optim.fck", adam_.state());
  std::ostringstream out;
  out << "epoch = " << epoch_ << "\n"
      << "adam_steps = " << adam_.steps() << "\n"
      << cfg_.to_text() << "rng = " << rng_.state() << "\n";
  bin::write_text_file(dir / "trainer.txt", out.str());
}

void Trainer::resume(const fs::path& dir) {
  const ModelConfig saved = ModelConfig::from_text(bin::read_text_file(dir / "config.txt"));
  if (saved.to_text() != model_.config().to_text()) {
    throw ValidationError("checkpoint " + dir.string() + " was written for a different model config");
  }
  nn::import_params(model_.params(), nn::load_arrays(dir / "params.fck"));
  const auto kv = parse_key_values(bin::read_text_file(dir / "trainer.txt"));
  auto need = [&kv, &dir](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw FormatError(dir.string() + "/trainer.txt lacks '" + k + "'");
    return it->second;
  };
  adam_.load_state(nn::load_arrays(dir / "optim.fck"), std::stoull(need("adam_steps")));
  epoch_ = std::stoi(need("epoch"));
  rng_.set_state(need("rng"));
}

}  // namespace foley
