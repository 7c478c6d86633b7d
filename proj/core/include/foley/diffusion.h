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

#ifndef FOLEY_DIFFUSION_H_
#define FOLEY_DIFFUSION_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "foley/event_feature.h"
#include "foley/nn/tensor.h"
#include "foley/unet.h"
#include "foley/wave_io.h"

namespace foley {

// Variance-preserving cosine schedule: alpha = cos(pi t / 2) is the signal
// scale (sqrt of alpha_bar) and sigma = sin(pi t / 2) the noise scale.
struct Schedule {
  double alpha = 1.0;
  double sigma = 0.0;
  // 1 - sigma^2 rather than alpha^2 so alpha_bar + sigma^2 == 1 holds in
  // floating point as well.
  double alpha_bar() const { return 1.0 - sigma * sigma; }
};

// Throws DomainError for t outside [0, 1].
Schedule schedule(double t);

template <typename T>
struct Noised {
  Tensor<T> x_t;
  Tensor<T> eps;
};

// x_t = alpha(t) x0 + sigma(t) eps with eps drawn from `rng`.
template <typename T>
Noised<T> noise(const Tensor<T>& x0, double t, nn::Rng& rng);

// Same with a caller-supplied eps.
template <typename T>
Tensor<T> noise_with(const Tensor<T>& x0, const Tensor<T>& eps, double t);

// eps_uncond + w (eps_cond - eps_uncond); ShapeError on mismatch.
template <typename T>
Tensor<T> cfg_combine(const Tensor<T>& eps_cond, const Tensor<T>& eps_uncond, double w);

struct SamplerConfig {
  int steps = 50;
  double guidance = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Noise prediction for state x at time t.
using Denoiser = std::function<std::vector<double>(const std::vector<double>& x, double t)>;

// Supplies the starting state and the per-step standard normal draws.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual std::vector<double> initial(std::size_t n) = 0;
  // Draw for the transition t -> s (s < t).
  virtual std::vector<double> step(std::size_t n, double t, double s) = 0;
};

// Independent Gaussian draws from one seeded stream.
class GaussianNoise : public NoiseSource {
 public:
  explicit GaussianNoise(std::uint64_t seed) : rng_(seed) {}
  std::vector<double> initial(std::size_t n) override;
  std::vector<double> step(std::size_t n, double t, double s) override;

 private:
  nn::Rng rng_;
};

// Draws derived from one Brownian path W over tau = (sigma/alpha)^2, fixed
// on a uniform grid of `fine_steps` times. Any step count dividing
// `fine_steps` then reads its increments from the same path, so runs at
// different step counts share their randomness. Each draw is the
// normalized Brownian-bridge residual of W(tau_s) given W(tau_t).
class BrownianNoise : public NoiseSource {
 public:
  BrownianNoise(std::uint64_t seed, std::size_t n, int fine_steps = 64);
  std::vector<double> initial(std::size_t n) override;
  std::vector<double> step(std::size_t n, double t, double s) override;

 private:
  int grid_index(double t) const;

  int fine_steps_;
  std::vector<double> start_;
  std::vector<double> tau_;
  std::vector<std::vector<double>> path_;  // path_[j] = W(tau_ at grid point j)
};

// One ancestral update from t to s < t given the noise prediction, using
// x0_hat = (x - sigma_t eps) / alpha_t (0 when alpha_t < 1e-8). Returns
// x0_hat when s == 0.
std::vector<double> ancestral_step(const std::vector<double>& x, const std::vector<double>& eps,
                                   double t, double s, const std::vector<double>& z);

// Runs `steps` ancestral updates on the uniform grid 1 = t_0 > ... > t_steps
// = 0 starting from noise.initial(n). NumericError on non-finite state.
std::vector<double> sample(const Denoiser& denoiser, std::size_t n, int steps,
                           NoiseSource& noise);

// Classifier-free guided denoiser over a trained model; skips the
// unconditional pass when w is 0 or 1.
Denoiser guided_denoiser(const UNet<float>& model, std::optional<int> class_id,
                         const EventFeature* events, double guidance);

// Converts an event feature to the model's [1 x frames] input, checking
// geometry against the model config (ShapeError on mismatch).
Tensor<float> feature_tensor(const EventFeature& f, const ModelConfig& cfg);

// Full generation: guided denoiser + Gaussian noise seeded by cfg.seed.
Waveform generate(const UNet<float>& model, std::optional<int> class_id,
                  const EventFeature* events, const SamplerConfig& cfg);

}  // namespace foley

#endif  // FOLEY_DIFFUSION_H_
