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

#ifndef FOLEY_TRAINER_H_
#define FOLEY_TRAINER_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "foley/corpus.h"
#include "foley/diffusion.h"
#include "foley/errors.h"
#include "foley/nn/optimizer.h"
#include "foley/unet.h"

namespace foley {

struct TrainConfig {
  double cond_drop_p = 0.1;
  int epochs = 1;
  int batch = 8;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_text() const;
  void apply(const std::map<std::string, std::string>& kv);
};

template <typename T>
struct TrainExample {
  const Tensor<T>* x0 = nullptr;
  int class_id = 0;
  const Tensor<T>* events = nullptr;
};

// Called once per item with the condition actually fed to the model.
using ConditionHook =
    std::function<void(std::size_t item, bool dropped, bool has_class, bool has_events)>;

// Mean squared error between predicted and true noise; writes
// dL/d(eps_hat) scaled by `grad_scale` into `grad` when given.
template <typename T>
double noise_loss(const Tensor<T>& eps_hat, const Tensor<T>& eps, Tensor<T>* grad = nullptr,
                  double grad_scale = 1.0) {
  if (!eps_hat.same_shape(eps)) {
    throw ShapeError("prediction " + eps_hat.shape_str() + " vs noise " + eps.shape_str());
  }
  const std::size_t n = eps.size();
  double acc = 0.0;
  if (grad) *grad = Tensor<T>(eps.channels, eps.length);
  const double g = 2.0 * grad_scale / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(eps_hat.data[i]) - static_cast<double>(eps.data[i]);
    acc += d * d;
    if (grad) grad->data[i] = static_cast<T>(g * d);
  }
  return acc / static_cast<double>(n);
}

// One diffusion training step over a batch: per item draws t ~ U[0, 1), one
// Bernoulli(cond_drop_p) that drops class and events together, and eps;
// accumulates parameter gradients of the batch-mean loss and returns that
// loss. `Model` needs a nested Tape type plus forward(x, t, Condition, Tape*)
// and backward(Tape, grad). NumericError on a non-finite loss.
template <typename T, typename Model>
double training_step(Model& model, std::span<const TrainExample<T>> batch, double cond_drop_p,
                     nn::Rng& rng, const ConditionHook& hook = {}) {
  if (batch.empty()) throw DomainError("empty training batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TrainExample<T>& ex = batch[i];
    const double t = rng.uniform();
    const bool dropped = rng.bernoulli(cond_drop_p);
    Condition<T> cond;
    if (!dropped) {
      cond.class_id = ex.class_id;
      cond.events = ex.events;
    }
    if (hook) hook(i, dropped, cond.class_id.has_value(), cond.events != nullptr);
    const Noised<T> nz = noise(*ex.x0, t, rng);
    typename Model::Tape tape;
    const Tensor<T> eps_hat = model.forward(nz.x_t, t, cond, &tape);
    Tensor<T> grad;
    const double loss = noise_loss(eps_hat, nz.eps, &grad, scale);
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite loss at batch item " + std::to_string(i) + " (t=" +
                         std::to_string(t) + ", class " + std::to_string(ex.class_id) +
                         (dropped ? ", dropped" : "") + ")");
    }
    model.backward(tape, grad);
    total += loss;
  }
  return total * scale;
}

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  std::size_t steps = 0;
};

// Optimizes a float model over epochs of shuffled batches and manages the
// resumable checkpoint directory:
//   params.fck   model parameters
//   config.txt   model config (key = value)
//   optim.fck    Adam moments
//   trainer.txt  epoch, optimizer step, RNG state, train config
class Trainer {
 public:
  Trainer(UNet<float>& model, TrainConfig cfg);

  EpochStats train_epoch(BatchStream& stream);

  int epoch() const { return epoch_; }
  const TrainConfig& config() const { return cfg_; }
  nn::Rng& rng() { return rng_; }

  void save(const std::filesystem::path& dir) const;
  // Restores parameters, optimizer state, epoch counter and RNG stream.
  void resume(const std::filesystem::path& dir);

 private:
  UNet<float>& model_;
  TrainConfig cfg_;
  nn::Adam<float> adam_;
  nn::Rng rng_;
  int epoch_ = 0;
};

void save_model(const UNet<float>& model, const std::filesystem::path& dir);
// Builds the model from config.txt and loads params.fck.
std::unique_ptr<UNet<float>> load_model(const std::filesystem::path& dir);

}  // namespace foley

#endif  // FOLEY_TRAINER_H_
