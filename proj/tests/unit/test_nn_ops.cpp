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
#include <functional>

#include <gtest/gtest.h>

#include "foley/errors.h"
#include "foley/nn/grad_check.h"
#include "foley/nn/layers.h"
#include "foley/nn/ops.h"
#include "oracles.h"
#include "test_util.h"

namespace foley::nn {
namespace {

using testing::as_tensor;
using testing::input_param;
using testing::random_tensor;

constexpr double kOpTol = 1e-6;
constexpr int kSeeds = 20;


void accumulate(Param<double>& p, const Tensor<double>& g) {
  ASSERT_EQ(p.grad.size(), g.data.size());
  for (std::size_t i = 0; i < g.data.size(); ++i) p.grad[i] += g.data[i];
}

TEST(Conv1d, IdentityKernelIsIdentity) {
  ParamStore<double> store;
  Rng rng(1);
  Conv1d<double> conv(store, "c", {1, 1, 1, 1, 0}, rng);
  fill(conv.weight(), 1.0);
  fill(conv.bias(), 0.0);
  const Tensor<double> x = random_tensor(1, 9, rng);
  EXPECT_EQ(conv.forward(x).data, x.data);
}

TEST(Conv1d, HandComputedExample) {
  Tensor<double> x(1, 3);
  x.data = {1, 2, 3};
  const std::vector<double> w = {1, 1};
  const Tensor<double> y = conv1d<double>(x, w, {}, {1, 1, 2, 1, 0});
  EXPECT_EQ(testing::std_vec(y.data), (std::vector<double>{3, 5}));
}

TEST(Conv1d, LengthFormula) {
  EXPECT_EQ(conv1d_output_length(8, 2, 2, 0), 4);
  EXPECT_EQ(conv1d_output_length(8000, 5, 2, 2), 4000);
  EXPECT_EQ(conv1d_output_length(7, 3, 1, 1), 7);
  EXPECT_EQ(conv1d_transposed_output_length(4, 2, 2), 8);
  EXPECT_EQ(conv1d_transposed_output_length(4, 5, 2), 11);
  Tensor<double> x(1, 8, 1.0);
  EXPECT_EQ((conv1d<double>(x, std::vector<double>{1, 1}, {}, {1, 1, 2, 2, 0}).length), 4);
}

TEST(Conv1d, MatchesDirectLoopOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 1 + rng.uniform_int(3), out = 1 + rng.uniform_int(3);
    const int k = 1 + rng.uniform_int(5), s = 1 + rng.uniform_int(3), p = rng.uniform_int(3);
    const int len = k + rng.uniform_int(12);
    ParamStore<double> store;
    Conv1d<double> conv(store, "c", {in, out, k, s, p}, rng);
    const Tensor<double> x = random_tensor(in, len, rng);
    const auto ref = oracle::conv1d(oracle::to_mat(x), testing::std_vec(conv.weight().value), testing::std_vec(conv.bias().value),
                                    out, k, s, p);
    const Tensor<double> y = conv.forward(x);
    ASSERT_EQ(y.channels, out);
    ASSERT_EQ(y.length, static_cast<int>(ref[0].size()));
    for (int o = 0; o < out; ++o) {
      for (int t = 0; t < y.length; ++t) EXPECT_NEAR(y(o, t), ref[o][t], 1e-12);
    }
  }
}

TEST(Conv1d, ShapeMismatchNamesBothShapes) {
  ParamStore<double> store;
  Rng rng(3);
  Conv1d<double> conv(store, "c", {2, 3, 3, 1, 0}, rng);
  try {
    conv.forward(Tensor<double>(4, 10));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("[4 x 10]"), std::string::npos) << m;
    EXPECT_NE(m.find("2"), std::string::npos) << m;
  }
  EXPECT_THROW(conv.forward(Tensor<double>(2, 2)), ShapeError);
}

TEST(ConvTranspose1d, UnitKernelIsIdentity) {
  ParamStore<double> store;
  Rng rng(4);
  ConvTranspose1d<double> conv(store, "t", {1, 1, 1, 1, 0}, rng);
  fill(conv.weight(), 1.0);
  fill(conv.bias(), 0.0);
  const Tensor<double> x = random_tensor(1, 7, rng);
  EXPECT_EQ(conv.forward(x).data, x.data);
}

TEST(ConvTranspose1d, MatchesScatterOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 1 + rng.uniform_int(3), out = 1 + rng.uniform_int(3);
    const int k = 1 + rng.uniform_int(5), s = 1 + rng.uniform_int(3);
    const int len = 1 + rng.uniform_int(8);
    ParamStore<double> store;
    ConvTranspose1d<double> conv(store, "t", {in, out, k, s, 0}, rng);
    const Tensor<double> x = random_tensor(in, len, rng);
    const auto ref =
        oracle::conv_transposed(oracle::to_mat(x), testing::std_vec(conv.weight().value), testing::std_vec(conv.bias().value), out, k, s);
    const Tensor<double> y = conv.forward(x);
    ASSERT_EQ(y.length, (len - 1) * s + k);
    for (int o = 0; o < out; ++o) {
      for (int t = 0; t < y.length; ++t) EXPECT_NEAR(y(o, t), ref[o][t], 1e-12);
    }
  }
}

TEST(ConvTranspose1d, IsAdjointOfConv) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int a = 1 + rng.uniform_int(4), b = 1 + rng.uniform_int(4);
    const int k = 1 + rng.uniform_int(5), s = 1 + rng.uniform_int(3);
    const int lout = 1 + rng.uniform_int(10);
    const int lin = (lout - 1) * s + k;
    std::vector<double> w(static_cast<std::size_t>(a) * b * k);
    for (double& v : w) v = rng.normal();
    const Tensor<double> x = random_tensor(a, lin, rng);
    const Tensor<double> y = random_tensor(b, lout, rng);
    const Tensor<double> cx = conv1d<double>(x, w, {}, {a, b, k, s, 0});
    const Tensor<double> ty = conv1d_transposed<double>(y, w, {}, {b, a, k, s, 0});
    ASSERT_EQ(cx.length, lout);
    ASSERT_EQ(ty.length, lin);
    EXPECT_NEAR(dot(cx, y), dot(x, ty), 1e-10);
  }
}

TEST(Affine, HandExample) {
  Tensor<double> x(1, 1);
  x.data = {3};
  const Tensor<double> y = affine<double>(x, std::vector<double>{2}, std::vector<double>{1}, 1);
  EXPECT_EQ(y.data[0], 7.0);
}

TEST(Activation, ValuesAndIdentity) {
  Tensor<double> x(1, 3);
  x.data = {-1.0, 0.0, 2.0};
  EXPECT_EQ(activate(Activation::kIdentity, x).data, x.data);
  const Tensor<double> s = activate(Activation::kSilu, x);
  EXPECT_NEAR(s.data[0], -1.0 / (1.0 + std::exp(1.0)), 1e-15);
  EXPECT_EQ(s.data[1], 0.0);
  const Tensor<double> t = activate(Activation::kTanh, x);
  EXPECT_NEAR(t.data[2], std::tanh(2.0), 1e-15);
}

TEST(TensorOps, ConcatSplitCropFlip) {
  Rng rng(7);
  const Tensor<double> a = random_tensor(2, 5, rng);
  const Tensor<double> b = random_tensor(3, 5, rng);
  const Tensor<double> c = concat_channels(a, b);
  EXPECT_EQ(c.channels, 5);
  auto [a2, b2] = split_channels(c, 2);
  EXPECT_EQ(a2.data, a.data);
  EXPECT_EQ(b2.data, b.data);
  EXPECT_THROW(concat_channels(a, random_tensor(1, 4, rng)), ShapeError);

  const Tensor<double> cr = crop(a, 1, 3);
  EXPECT_EQ(cr.length, 3);
  EXPECT_EQ(cr(1, 0), a(1, 1));
  const Tensor<double> back = crop_backward(cr, 5, 1);
  EXPECT_EQ(back(0, 0), 0.0);
  EXPECT_EQ(back(1, 3), a(1, 3));
  EXPECT_EQ(back(1, 4), 0.0);
  EXPECT_THROW(crop(a, 3, 3), ShapeError);

  const Tensor<double> f = flip_time(a);
  EXPECT_EQ(f(0, 0), a(0, 4));
  EXPECT_EQ(flip_time(f).data, a.data);
}

// dot(layer(x), R) as the scalar objective, with R fixed per seed.
struct Probe {
  Tensor<double> r;
  double operator()(const Tensor<double>& y, Rng& rng) {
    if (r.size() != y.size()) r = random_tensor(y.channels, y.length, rng);
    return dot(y, r);
  }
};

TEST(GradCheck, Conv1dOverSeeds) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(100 + seed);
    const int in = 1 + rng.uniform_int(3), out = 1 + rng.uniform_int(3);
    const int k = 1 + rng.uniform_int(5), s = 1 + rng.uniform_int(3), p = rng.uniform_int(3);
    const int len = k + rng.uniform_int(8);
    ParamStore<double> store;
    Conv1d<double> conv(store, "c", {in, out, k, s, p}, rng);
    Param<double>& xp = input_param(store, "x", random_tensor(in, len, rng));
    Probe probe;
    auto loss = [&](bool acc) {
      const Tensor<double> x = as_tensor(xp, in, len);
      const Tensor<double> y = conv.forward(x);
      const double l = probe(y, rng);
      if (acc) accumulate(xp, conv.backward(x, probe.r));
      return l;
    };
    const GradCheckResult r = grad_check(loss, store);
    EXPECT_LT(r.max_rel_error, kOpTol) << "seed " << seed << " worst " << r.worst_param;
  }
}

TEST(GradCheck, ConvTranspose1dOverSeeds) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(200 + seed);
    const int in = 1 + rng.uniform_int(3), out = 1 + rng.uniform_int(3);
    const int k = 1 + rng.uniform_int(5), s = 1 + rng.uniform_int(3);
    const int len = 1 + rng.uniform_int(8);
    ParamStore<double> store;
    ConvTranspose1d<double> conv(store, "t", {in, out, k, s, 0}, rng);
    Param<double>& xp = input_param(store, "x", random_tensor(in, len, rng));
    Probe probe;
    auto loss = [&](bool acc) {
      const Tensor<double> x = as_tensor(xp, in, len);
      const double l = probe(conv.forward(x), rng);
      if (acc) accumulate(xp, conv.backward(x, probe.r));
      return l;
    };
    const GradCheckResult r = grad_check(loss, store);
    EXPECT_LT(r.max_rel_error, kOpTol) << "seed " << seed << " worst " << r.worst_param;
  }
}

TEST(GradCheck, LinearOverSeeds) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(300 + seed);
    const int in = 1 + rng.uniform_int(5), out = 1 + rng.uniform_int(5);
    const int n = 1 + rng.uniform_int(4);
    ParamStore<double> store;
    Linear<double> lin(store, "l", in, out, rng);
    Param<double>& xp = input_param(store, "x", random_tensor(in, n, rng));
    Probe probe;
    auto loss = [&](bool acc) {
      const Tensor<double> x = as_tensor(xp, in, n);
      const double l = probe(lin.forward(x), rng);
      if (acc) accumulate(xp, lin.backward(x, probe.r));
      return l;
    };
    const GradCheckResult r = grad_check(loss, store);
    EXPECT_LT(r.max_rel_error, kOpTol) << "seed " << seed << " worst " << r.worst_param;
  }
}

TEST(GradCheck, ActivationsOverSeeds) {
  for (Activation a : {Activation::kIdentity, Activation::kSilu, Activation::kTanh}) {
    for (int seed = 0; seed < kSeeds; ++seed) {
      Rng rng(400 + seed);
      ParamStore<double> store;
      Param<double>& xp = input_param(store, "x", random_tensor(2, 6, rng, 2.0));
      Probe probe;
      auto loss = [&](bool acc) {
        const Tensor<double> x = as_tensor(xp, 2, 6);
        const double l = probe(activate(a, x), rng);
        if (acc) accumulate(xp, activate_backward(a, x, probe.r));
        return l;
      };
      const GradCheckResult r = grad_check(loss, store);
      EXPECT_LT(r.max_rel_error, kOpTol) << "seed " << seed;
    }
  }
}

TEST(GradCheck, CropConcatFlipOverSeeds) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(500 + seed);
    const int len = 4 + rng.uniform_int(6);
    const int off = rng.uniform_int(2), keep = len - off - rng.uniform_int(2);
    ParamStore<double> store;
    Param<double>& ap = input_param(store, "a", random_tensor(2, len, rng));
    Param<double>& bp = input_param(store, "b", random_tensor(1, keep, rng));
    Probe probe;
    auto loss = [&](bool acc) {
      const Tensor<double> a = as_tensor(ap, 2, len);
      const Tensor<double> b = as_tensor(bp, 1, keep);
      const Tensor<double> y = flip_time(concat_channels(crop(a, off, keep), b));
      const double l = probe(y, rng);
      if (acc) {
        auto [ga, gb] = split_channels(flip_time(probe.r), 2);
        accumulate(ap, crop_backward(ga, len, off));
        accumulate(bp, gb);
      }
      return l;
    };
    const GradCheckResult r = grad_check(loss, store);
    EXPECT_LT(r.max_rel_error, kOpTol) << "seed " << seed;
  }
}

TEST(GradCheck, DetectsWrongGradient) {
  Rng rng(9);
  ParamStore<double> store;
  Param<double>& xp = input_param(store, "x", random_tensor(1, 4, rng));
  auto loss = [&](bool acc) {
    double l = 0.0;
    for (std::size_t i = 0; i < xp.value.size(); ++i) {
      l += xp.value[i] * xp.value[i];
      if (acc) xp.grad[i] += xp.value[i];  // missing factor 2
    }
    return l;
  };
  EXPECT_GT(grad_check(loss, store).max_rel_error, 0.1);
}

}  // namespace
}  // namespace foley::nn
