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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "foley/diffusion.h"
#include "foley/errors.h"
#include "foley/nn/layers.h"
#include "foley/nn/optimizer.h"
#include "oracles.h"
#include "test_util.h"

namespace foley {
namespace {

using nn::Rng;
using testing::random_tensor;

TEST(Schedule, Endpoints) {
  EXPECT_EQ(schedule(0.0).alpha, 1.0);
  EXPECT_EQ(schedule(0.0).sigma, 0.0);
  EXPECT_EQ(schedule(1.0).alpha, 0.0);
  EXPECT_EQ(schedule(1.0).sigma, 1.0);
  EXPECT_NEAR(schedule(0.5).alpha, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(schedule(0.5).sigma, std::sqrt(0.5), 1e-15);
  EXPECT_THROW(schedule(-0.01), DomainError);
  EXPECT_THROW(schedule(1.01), DomainError);
  EXPECT_THROW(schedule(std::nan("")), DomainError);
}

TEST(Schedule, VariancePreservedExactlyAndMonotone) {
  double prev = 2.0;
  for (int i = 0; i <= 100000; ++i) {
    const Schedule s = schedule(i / 100000.0);
    ASSERT_EQ(s.alpha_bar() + s.sigma * s.sigma, 1.0) << i;
    ASSERT_LE(s.alpha_bar(), prev);
    prev = s.alpha_bar();
  }
  EXPECT_EQ(schedule(0.0).alpha_bar(), 1.0);
  EXPECT_EQ(schedule(1.0).alpha_bar(), 0.0);
}

TEST(Noise, EndpointsExact) {
  Rng rng(1);
  const Tensor<double> x0 = random_tensor(1, 50, rng);
  const Noised<double> n0 = noise(x0, 0.0, rng);
  EXPECT_EQ(n0.x_t.data, x0.data);
  const Noised<double> n1 = noise(x0, 1.0, rng);
  EXPECT_EQ(n1.x_t.data, n1.eps.data);
  const Tensor<double> eps = random_tensor(1, 50, rng);
  const Tensor<double> mid = noise_with(x0, eps, 0.3);
  const Schedule s = schedule(0.3);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(mid.data[i], s.alpha * x0.data[i] + s.sigma * eps.data[i], 1e-15);
}

TEST(Noise, VariancePreservedMonteCarlo) {
  Rng rng(2);
  const int n = 100000;
  for (double t : {0.1, 0.35, 0.5, 0.8, 0.97}) {
    const Tensor<double> x0 = random_tensor(1, n, rng);
    const Noised<double> nz = noise(x0, t, rng);
    double s = 0.0, s2 = 0.0;
    for (double v : nz.x_t.data) {
      s += v;
      s2 += v * v;
    }
    const double var = s2 / n - (s / n) * (s / n);
    EXPECT_NEAR(var, 1.0, 0.02) << "t=" << t;
  }
}

TEST(CfgCombine, Cases) {
  Tensor<double> c(1, 3), u(1, 3);
  c.data = {1.0, -2.0, 0.5};
  u.data = {0.0, 4.0, 0.25};
  EXPECT_EQ(cfg_combine(c, u, 0.0).data, u.data);
  EXPECT_EQ(cfg_combine(c, u, 1.0).data, c.data);
  EXPECT_EQ(cfg_combine(c, u, 2.0).data[0], 2.0);
  // affine in w
  for (double w : {0.3, 1.7, 3.0}) {
    const Tensor<double> a = cfg_combine(c, u, w);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.data[i], u.data[i] + w * (c.data[i] - u.data[i]), 1e-15);
  }
  EXPECT_THROW(cfg_combine(c, Tensor<double>(1, 4), 1.0), ShapeError);
}

TEST(SamplerConfig, Validation) {
  SamplerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.steps = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.steps = 10;
  cfg.guidance = -0.5;
  EXPECT_THROW(cfg.validate(), DomainError);
  GaussianNoise g(0);
  const Denoiser zero = [](const std::vector<double>& x, double) {
    return std::vector<double>(x.size(), 0.0);
  };
  EXPECT_THROW(sample(zero, 4, 0, g), DomainError);
}

TEST(Sample, ZeroModelMatchesBetaFormReference) {
  const Denoiser zero = [](const std::vector<double>& x, double) {
    return std::vector<double>(x.size(), 0.0);
  };
  for (int steps : {1, 2, 7, 50}) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
      GaussianNoise g(seed);
      const auto got = sample(zero, 33, steps, g);
      Rng rng(seed);
      const auto want = oracle::ddpm_reference(
          [](const std::vector<double>& x, double) { return std::vector<double>(x.size(), 0.0); },
          33, steps, rng);
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
    }
  }
}

TEST(Sample, NonZeroModelMatchesBetaFormReference) {
  auto model = [](const std::vector<double>& x, double t) {
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = 0.7 * std::tanh(x[i]) + 0.1 * t;
    return e;
  };
  GaussianNoise g(5);
  const auto got = sample(model, 17, 20, g);
  Rng rng(5);
  const auto want = oracle::ddpm_reference(model, 17, 20, rng);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
}

TEST(Sample, NonFiniteIsNumericError) {
  const Denoiser bad = [](const std::vector<double>& x, double) {
    return std::vector<double>(x.size(), std::nan(""));
  };
  GaussianNoise g(0);
  EXPECT_THROW(sample(bad, 4, 5, g), NumericError);
}

// Pointwise MLP epsilon model for scalar data x0 in {-a, +a}, trained with
// the same noising and loss as the full model.
struct ToyModel {
  nn::ParamStore<double> store;
  nn::Mlp<double> mlp;

  explicit ToyModel(double a) {
    Rng rng(17);
    mlp = nn::Mlp<double>(store, "toy", {2, 48, 48, 1}, nn::Activation::kSilu, rng);
    nn::AdamConfig ac;
    ac.lr = 3e-3;
    nn::Adam<double> adam(store, ac);
    const int batch = 256;
    for (int it = 0; it < 2500; ++it) {
      Tensor<double> in(2, batch), eps(1, batch);
      for (int j = 0; j < batch; ++j) {
        const double t = rng.uniform();
        const double x0 = rng.bernoulli(0.5) ? a : -a;
        const Schedule s = schedule(t);
        eps(0, j) = rng.normal();
        in(0, j) = s.alpha * x0 + s.sigma * eps(0, j);
        in(1, j) = t;
      }
      typename nn::Mlp<double>::Cache cache;
      const Tensor<double> out = mlp.forward(in, &cache);
      Tensor<double> grad(1, batch);
      for (int j = 0; j < batch; ++j) grad(0, j) = 2.0 * (out(0, j) - eps(0, j)) / batch;
      store.zero_grad();
      mlp.backward(cache, grad);
      adam.step();
    }
  }

  std::vector<double> operator()(const std::vector<double>& x, double t) const {
    Tensor<double> in(2, static_cast<int>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
      in(0, static_cast<int>(j)) = x[j];
      in(1, static_cast<int>(j)) = t;
    }
    const Tensor<double> out = mlp.forward(in);
    return {out.data.begin(), out.data.end()};
  }
};

const ToyModel& toy_model() {
  static const ToyModel model(0.5);
  return model;
}

TEST(Sample, TwoPointToyConcentratesNearModes) {
  const double a = 0.5;
  const ToyModel& model = toy_model();
  const Denoiser d = [&](const std::vector<double>& x, double t) { return model(x, t); };
  GaussianNoise g(123);
  const auto xs = sample(d, 500, 50, g);
  int plus = 0, minus = 0;
  for (double x : xs) {
    if (std::abs(x - a) < 0.25 * a) ++plus;
    if (std::abs(x + a) < 0.25 * a) ++minus;
  }
  // At least 90% land near a mode; the split is Binomial(n, 1/2) and must
  // fall within 4.5 standard deviations.
  EXPECT_GE(plus + minus, 450);
  const double n = plus + minus;
  EXPECT_LT(std::abs(plus - n / 2.0), 4.5 * std::sqrt(n / 4.0)) << plus << " vs " << minus;
}

TEST(Sample, DoublingStepsConverges) {
  const ToyModel& model = toy_model();
  const Denoiser d = [&](const std::vector<double>& x, double t) { return model(x, t); };
  const std::vector<int> counts = {8, 16, 32, 64};
  std::vector<double> diff(counts.size() - 1, 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::vector<double>> out;
    for (int steps : counts) {
      BrownianNoise noise(seed, 64, 64);
      out.push_back(sample(d, 64, steps, noise));
    }
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < 64; ++i) s += (out[k][i] - out[k + 1][i]) * (out[k][i] - out[k + 1][i]);
      diff[k] += std::sqrt(s) / 10.0;
    }
  }
  for (std::size_t k = 0; k + 1 < diff.size(); ++k) {
    EXPECT_LT(diff[k + 1], diff[k]) << counts[k + 1] << "->" << counts[k + 2];
  }
}

TEST(BrownianNoise, MarginalsAreStandardNormalAndOffGridRejected) {
  BrownianNoise noise(3, 20000, 64);
  for (int j = 0; j < 63; j += 7) {
    const double t = 1.0 - j / 64.0, s = 1.0 - (j + 1) / 64.0;
    const auto z = noise.step(20000, t, s);
    double m = 0.0, v = 0.0;
    for (double x : z) {
      m += x;
      v += x * x;
    }
    m /= z.size();
    EXPECT_NEAR(m, 0.0, 0.05);
    EXPECT_NEAR(v / z.size(), 1.0, 0.05);
  }
  // The final step to t = 0 injects no noise.
  for (double z : noise.step(20000, 1.0 / 64.0, 0.0)) ASSERT_EQ(z, 0.0);
  EXPECT_THROW(noise.step(20000, 0.5, 0.49), DomainError);
}

TEST(Generate, DeterministicForFixedSeed) {
  ModelConfig cfg = ModelConfig::tiny();
  UNet<float> model(cfg);
  Rng rng(4);
  testing::randomize(model.params(), rng, 0.3);
  EventFeature ev;
  ev.window = cfg.feature_window;
  ev.hop = cfg.feature_hop;
  ev.source_rate = cfg.sample_rate;
  ev.values.assign(cfg.frames(), 0.2);
  SamplerConfig sc;
  sc.steps = 6;
  sc.seed = 11;
  const Waveform a = generate(model, 1, &ev, sc);
  const Waveform b = generate(model, 1, &ev, sc);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(static_cast<int>(a.samples.size()), cfg.sample_len);
  sc.seed = 12;
  EXPECT_NE(generate(model, 1, &ev, sc).samples, a.samples);
}

TEST(Generate, FeatureGeometryMismatchIsShapeError) {
  ModelConfig cfg = ModelConfig::tiny();
  UNet<float> model(cfg);
  EventFeature ev;
  ev.window = cfg.feature_window * 2;
  ev.hop = cfg.feature_hop;
  ev.source_rate = cfg.sample_rate;
  ev.values.assign(cfg.frames(), 0.2);
  EXPECT_THROW(feature_tensor(ev, cfg), ShapeError);
}

}  // namespace
}  // namespace foley
