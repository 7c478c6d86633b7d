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

#include "foley/diffusion.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "foley/errors.h"

namespace foley {

namespace {

constexpr double kAlphaFloor = 1e-8;

double grid_time(int k, int steps) { return static_cast<double>(steps - k) / steps; }

void check_finite(const std::vector<double>& x, double t) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite sampler state at t=" + std::to_string(t));
    }
  }
}

}  // namespace

Schedule schedule(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("diffusion time outside [0, 1]");
  if (t == 1.0) return {0.0, 1.0};
  const double a = 0.5 * std::numbers::pi * t;
  return {std::cos(a), std::sin(a)};
}

template <typename T>
Tensor<T> noise_with(const Tensor<T>& x0, const Tensor<T>& eps, double t) {
  if (!x0.same_shape(eps)) {
    throw ShapeError("noise " + eps.shape_str() + " does not match data " + x0.shape_str());
  }
  const Schedule s = schedule(t);
  Tensor<T> out(x0.channels, x0.length);
  if (s.sigma == 0.0) {
    out.data = x0.data;
    return out;
  }
  if (s.alpha == 0.0) {
    out.data = eps.data;
    return out;
  }
  const T a = static_cast<T>(s.alpha);
  const T b = static_cast<T>(s.sigma);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a * x0.data[i] + b * eps.data[i];
  return out;
}

template <typename T>
Noised<T> noise(const Tensor<T>& x0, double t, nn::Rng& rng) {
  Noised<T> n;
  n.eps = Tensor<T>(x0.channels, x0.length);
  rng.fill_normal(std::span<T>(n.eps.data));
  n.x_t = noise_with(x0, n.eps, t);
  return n;
}

template <typename T>
Tensor<T> cfg_combine(const Tensor<T>& eps_cond, const Tensor<T>& eps_uncond, double w) {
  if (!eps_cond.same_shape(eps_uncond)) {
    throw ShapeError("guidance inputs differ: " + eps_cond.shape_str() + " vs " +
                     eps_uncond.shape_str());
  }
  Tensor<T> out(eps_cond.channels, eps_cond.length);
  const T wt = static_cast<T>(w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] = eps_uncond.data[i] + wt * (eps_cond.data[i] - eps_uncond.data[i]);
  }
  return out;
}

template Noised<float> noise(const Tensor<float>&, double, nn::Rng&);
template Noised<double> noise(const Tensor<double>&, double, nn::Rng&);
template Tensor<float> noise_with(const Tensor<float>&, const Tensor<float>&, double);
template Tensor<double> noise_with(const Tensor<double>&, const Tensor<double>&, double);
template Tensor<float> cfg_combine(const Tensor<float>&, const Tensor<float>&, double);
template Tensor<double> cfg_combine(const Tensor<double>&, const Tensor<double>&, double);

void SamplerConfig::validate() const {
  if (steps < 1) throw DomainError("sampler steps must be >= 1, got " + std::to_string(steps));
  if (!(guidance >= 0.0) || !std::isfinite(guidance)) {
    throw DomainError("guidance weight must be finite and >= 0");
  }
}

// ---- noise sources ---------------------------------------------------------

std::vector<double> GaussianNoise::initial(std::size_t n) {
  std::vector<double> z(n);
  rng_.fill_normal(std::span<double>(z));
  return z;
}

std::vector<double> GaussianNoise::step(std::size_t n, double, double) { return initial(n); }

BrownianNoise::BrownianNoise(std::uint64_t seed, std::size_t n, int fine_steps)
    : fine_steps_(fine_steps) {
  if (fine_steps < 1) throw DomainError("fine_steps must be >= 1");
  nn::Rng rng(seed);
  start_.resize(n);
  rng.fill_normal(std::span<double>(start_));
  tau_.resize(fine_steps + 1);
  for (int j = 0; j <= fine_steps; ++j) {
    const Schedule s = schedule(grid_time(j, fine_steps));
    tau_[j] = s.alpha > 0.0 ? (s.sigma / s.alpha) * (s.sigma / s.alpha)
                            : std::numeric_limits<double>::infinity();
  }
  path_.assign(fine_steps + 1, std::vector<double>(n, 0.0));
  for (int j = fine_steps - 1; j >= 1; --j) {
    const double sd = std::sqrt(tau_[j] - tau_[j + 1]);
    for (std::size_t i = 0; i < n; ++i) path_[j][i] = path_[j + 1][i] + sd * rng.normal();
  }
}

int BrownianNoise::grid_index(double t) const {
  const double pos = (1.0 - t) * fine_steps_;
  const int j = static_cast<int>(std::lround(pos));
  if (std::abs(pos - j) > 1e-9 || j < 0 || j > fine_steps_) {
    throw DomainError("time " + std::to_string(t) + " is not on the " +
                      std::to_string(fine_steps_) + "-step noise grid");
  }
  return j;
}

std::vector<double> BrownianNoise::initial(std::size_t n) {
  if (n != start_.size()) throw ShapeError("noise source built for a different length");
  return start_;
}

std::vector<double> BrownianNoise::step(std::size_t n, double t, double s) {
  if (n != start_.size()) throw ShapeError("noise source built for a different length");
  const int jt = grid_index(t);
  const int js = grid_index(s);
  std::vector<double> z(n, 0.0);
  if (js == fine_steps_) return z;
  const std::vector<double>& ws = path_[js];
  const double ts = tau_[js];
  if (jt == 0) {
    const double inv = 1.0 / std::sqrt(ts);
    for (std::size_t i = 0; i < n; ++i) z[i] = ws[i] * inv;
    return z;
  }
  const std::vector<double>& wt = path_[jt];
  const double tt = tau_[jt];
  const double ratio = ts / tt;
  const double inv = 1.0 / std::sqrt(ts * (tt - ts) / tt);
  for (std::size_t i = 0; i < n; ++i) z[i] = (ws[i] - wt[i] * ratio) * inv;
  return z;
}

// ---- sampler ---------------------------------------------------------------

std::vector<double> ancestral_step(const std::vector<double>& x, const std::vector<double>& eps,
                                   double t, double s, const std::vector<double>& z) {
  if (eps.size() != x.size()) throw ShapeError("noise prediction length differs from state");
  if (!(s < t)) throw DomainError("ancestral step needs s < t");
  const Schedule st = schedule(t);
  const Schedule ss = schedule(s);
  const std::size_t n = x.size();
  std::vector<double> x0(n, 0.0);
  if (st.alpha >= kAlphaFloor) {
    for (std::size_t i = 0; i < n; ++i) x0[i] = (x[i] - st.sigma * eps[i]) / st.alpha;
  }
  if (s == 0.0) return x0;
  if (z.size() != n) throw ShapeError("noise draw length differs from state");

  const double a_ts = st.alpha / ss.alpha;
  const double var_t = st.sigma * st.sigma;
  const double var_s = ss.sigma * ss.sigma;
  const double var_ts = var_t - a_ts * a_ts * var_s;
  const double cx = a_ts * var_s / var_t;
  const double c0 = ss.alpha * var_ts / var_t;
  const double sd = std::sqrt(std::max(0.0, var_ts * var_s / var_t));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cx * x[i] + c0 * x0[i] + sd * z[i];
  return out;
}

std::vector<double> sample(const Denoiser& denoiser, std::size_t n, int steps,
                           NoiseSource& noise) {
  if (steps < 1) throw DomainError("sampler steps must be >= 1, got " + std::to_string(steps));
  std::vector<double> x = noise.initial(n);
  for (int k = 0; k < steps; ++k) {
    const double t = grid_time(k, steps);
    const double s = grid_time(k + 1, steps);
    const std::vector<double> eps = denoiser(x, t);
    check_finite(eps, t);
    std::vector<double> z;
    if (s > 0.0) z = noise.step(n, t, s);
    x = ancestral_step(x, eps, t, s, z);
    check_finite(x, s);
  }
  return x;
}

// ---- model glue ------------------------------------------------------------

Tensor<float> feature_tensor(const EventFeature& f, const ModelConfig& cfg) {
  if (f.window != cfg.feature_window || f.hop != cfg.feature_hop ||
      static_cast<int>(f.frame_count()) != cfg.frames()) {
    throw ShapeError("event feature (W=" + std::to_string(f.window) + ", h=" +
                     std::to_string(f.hop) + ", " + std::to_string(f.frame_count()) +
                     " frames) does not match the model (W=" +
                     std::to_string(cfg.feature_window) + ", h=" +
                     std::to_string(cfg.feature_hop) + ", " + std::to_string(cfg.frames()) +
                     " frames)");
  }
  Tensor<float> t(1, cfg.frames());
  for (std::size_t i = 0; i < f.values.size(); ++i) t.data[i] = static_cast<float>(f.values[i]);
  return t;
}

Denoiser guided_denoiser(const UNet<float>& model, std::optional<int> class_id,
                         const EventFeature* events, double guidance) {
  auto feature = std::make_shared<Tensor<float>>();
  if (events) *feature = feature_tensor(*events, model.config());
  const bool has_events = events != nullptr;
  return [&model, class_id, feature, has_events, guidance](const std::vector<double>& x,
                                                             double t) {
    Tensor<float> in(1, static_cast<int>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) in.data[i] = static_cast<float>(x[i]);
    Condition<float> cond;
    cond.class_id = class_id;
    cond.events = has_events ? feature.get() : nullptr;
    Tensor<float> eps;
    if (guidance == 0.0) {
      eps = model.forward(in, t, Condition<float>{});
    } else if (guidance == 1.0) {
      eps = model.forward(in, t, cond);
    } else {
      eps = cfg_combine(model.forward(in, t, cond), model.forward(in, t, Condition<float>{}),
                        guidance);
    }
    return std::vector<double>(eps.data.begin(), eps.data.end());
  };
}

Waveform generate(const UNet<float>& model, std::optional<int> class_id,
                  const EventFeature* events, const SamplerConfig& cfg) {
  cfg.validate();
  GaussianNoise noise(cfg.seed);
  const ModelConfig& mc = model.config();
  Waveform w;
  w.sample_rate = mc.sample_rate;
  w.samples = sample(guided_denoiser(model, class_id, events, cfg.guidance),
                     static_cast<std::size_t>(mc.sample_len), cfg.steps, noise);
  return w;
}

}  // namespace foley
