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
#include <cstring>
#include <limits>

#include <gtest/gtest.h>

#include "foley/errors.h"
#include "foley/nn/grad_check.h"
#include "foley/trainer.h"
#include "test_util.h"

namespace foley {
namespace {

using nn::Rng;
using testing::random_tensor;

// Stand-in models that record what they were conditioned on.
struct MockModel {
  enum class Kind { kExact, kZero, kNan };
  struct Tape {};

  Kind kind = Kind::kZero;
  const Tensor<double>* x0 = nullptr;
  std::vector<std::pair<bool, bool>> seen;  // (has_class, has_events)

  Tensor<double> forward(const Tensor<double>& x, double t, const Condition<double>& c,
                         Tape*) {
    seen.emplace_back(c.class_id.has_value(), c.events != nullptr);
    Tensor<double> out(x.channels, x.length);
    if (kind == Kind::kNan) {
      out.data.assign(out.size(), std::numeric_limits<double>::quiet_NaN());
    } else if (kind == Kind::kExact) {
      const Schedule s = schedule(t);
      for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = (x.data[i] - s.alpha * x0->data[i]) / s.sigma;
    }
    return out;
  }
  void backward(const Tape&, const Tensor<double>&) {}
};

TEST(NoiseLoss, ValueAndGradient) {
  Tensor<double> a(1, 2), b(1, 2), g;
  a.data = {1.0, 3.0};
  b.data = {0.0, 1.0};
  EXPECT_EQ(noise_loss(a, b, &g, 0.5), 2.5);
  EXPECT_EQ(g.data[0], 0.5);
  EXPECT_EQ(g.data[1], 1.0);
  EXPECT_THROW(noise_loss(a, Tensor<double>(1, 3)), ShapeError);
}

TEST(TrainingStep, ExactModelHasZeroLoss) {
  Rng rng(1);
  const Tensor<double> x0 = random_tensor(1, 256, rng, 0.3);
  MockModel m;
  m.kind = MockModel::Kind::kExact;
  m.x0 = &x0;
  std::vector<TrainExample<double>> batch(8, {&x0, 0, nullptr});
  for (int rep = 0; rep < 5; ++rep) {
    EXPECT_NEAR(training_step<double>(m, batch, 0.1, rng), 0.0, 1e-10);
  }
}

TEST(TrainingStep, ZeroModelLossIsNoiseVariance) {
  Rng rng(2);
  const Tensor<double> x0 = random_tensor(1, 4000, rng);
  MockModel m;
  std::vector<TrainExample<double>> batch(16, {&x0, 0, nullptr});
  // Mean of 64000 squared normals: sd of the estimate is sqrt(2/64000).
  EXPECT_NEAR(training_step<double>(m, batch, 0.1, rng), 1.0, 5.0 * std::sqrt(2.0 / 64000));
}

TEST(TrainingStep, DropAllNeverPassesConditions) {
  Rng rng(3);
  const Tensor<double> x0(1, 16), ev(1, 4);
  MockModel m;
  std::vector<TrainExample<double>> batch(50, {&x0, 1, &ev});
  int hook_calls = 0;
  training_step<double>(m, batch, 1.0, rng,
                        [&](std::size_t, bool dropped, bool has_class, bool has_events) {
                          ++hook_calls;
                          EXPECT_TRUE(dropped);
                          EXPECT_FALSE(has_class);
                          EXPECT_FALSE(has_events);
                        });
  EXPECT_EQ(hook_calls, 50);
  for (auto [c, e] : m.seen) {
    EXPECT_FALSE(c);
    EXPECT_FALSE(e);
  }
  m.seen.clear();
  training_step<double>(m, batch, 0.0, rng);
  for (auto [c, e] : m.seen) {
    EXPECT_TRUE(c);
    EXPECT_TRUE(e);
  }
}

TEST(TrainingStep, ClassAndEventsDroppedJointly) {
  Rng rng(4);
  const Tensor<double> x0(1, 8), ev(1, 4);
  MockModel m;
  std::vector<TrainExample<double>> batch(100, {&x0, 2, &ev});
  for (int rep = 0; rep < 20; ++rep) training_step<double>(m, batch, 0.3, rng);
  int dropped = 0;
  for (auto [c, e] : m.seen) {
    ASSERT_EQ(c, e);
    dropped += !c;
  }
  // 2000 Bernoulli(0.3) draws.
  EXPECT_NEAR(dropped / 2000.0, 0.3, 5.0 * std::sqrt(0.21 / 2000));
}

TEST(TrainingStep, NonFiniteLossIsNumericError) {
  Rng rng(5);
  const Tensor<double> x0(1, 8);
  MockModel m;
  m.kind = MockModel::Kind::kNan;
  std::vector<TrainExample<double>> batch(2, {&x0, 0, nullptr});
  EXPECT_THROW(training_step<double>(m, batch, 0.1, rng), NumericError);
  EXPECT_THROW(training_step<double>(m, std::span<const TrainExample<double>>{}, 0.1, rng),
               DomainError);
}

TEST(TrainingStep, GradientsMatchFiniteDifferencesOfBatchLoss) {
  ModelConfig cfg = ModelConfig::tiny();
  UNet<double> model(cfg);
  Rng init(6);
  testing::randomize(model.params(), init, 0.4);
  const Tensor<double> x0a = random_tensor(1, cfg.sample_len, init, 0.5);
  const Tensor<double> x0b = random_tensor(1, cfg.sample_len, init, 0.5);
  Tensor<double> ev(1, cfg.frames());
  for (double& v : ev.data) v = std::abs(init.normal());
  std::vector<TrainExample<double>> batch = {{&x0a, 0, &ev}, {&x0b, 1, &ev}, {&x0a, 1, &ev}};
  const Rng start(77);
  auto loss = [&](bool acc) {
    Rng rng = start;
    if (!acc) {
      // Same draws without touching gradients.
      nn::ParamStore<double>& s = model.params();
      std::vector<std::vector<double>> saved;
      for (auto* p : s.params()) saved.emplace_back(p->grad.begin(), p->grad.end());
      const double l = training_step<double>(model, batch, 0.4, rng);
      std::size_t k = 0;
      for (auto* p : s.params()) {
        std::copy(saved[k].begin(), saved[k].end(), p->grad.begin());
        ++k;
      }
      return l;
    }
    return training_step<double>(model, batch, 0.4, rng);
  };
  const nn::GradCheckResult r = nn::grad_check(loss, model.params(), 1e-5, 6);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param;
}

TEST(TrainConfig, ValidationAndText) {
  TrainConfig tc;
  EXPECT_NO_THROW(tc.validate());
  tc.cond_drop_p = 1.5;
  EXPECT_THROW(tc.validate(), DomainError);
  tc.cond_drop_p = 0.1;
  tc.batch = 0;
  EXPECT_THROW(tc.validate(), DomainError);
  TrainConfig a;
  a.epochs = 7;
  a.adam.lr = 5e-4;
  TrainConfig b;
  b.apply(parse_key_values(a.to_text()));
  EXPECT_EQ(b.to_text(), a.to_text());
}

std::vector<LabeledClip> tiny_clips(const ModelConfig& cfg, int count) {
  Rng rng(8);
  std::vector<LabeledClip> clips;
  for (int i = 0; i < count; ++i) {
    LabeledClip c;
    c.wave.sample_rate = cfg.sample_rate;
    c.wave.samples.resize(cfg.sample_len);
    for (double& v : c.wave.samples) v = 0.3 * rng.normal();
    c.class_id = i % cfg.class_count;
    c.class_name = cfg.class_names[c.class_id];
    c.source = "mem/" + std::to_string(i);
    clips.push_back(std::move(c));
  }
  return clips;
}

std::vector<float> run_epochs(const std::vector<LabeledClip>& clips, int epochs,
                              const testing::TempDir* split_at) {
  const ModelConfig cfg = ModelConfig::tiny();
  TrainConfig tc;
  tc.batch = 3;
  tc.seed = 21;
  FeatureCache cache;
  BatchStream stream(clips, tc.batch, cfg.feature_window, cfg.feature_hop, cache);
  UNet<float> model(cfg);
  Trainer trainer(model, tc);
  for (int e = 0; e < epochs; ++e) {
    if (split_at && e == 1) {
      trainer.save(split_at->path());
      UNet<float> fresh(cfg);
      Trainer resumed(fresh, tc);
      resumed.resume(split_at->path());
      EXPECT_EQ(resumed.epoch(), 1);
      for (; e < epochs; ++e) resumed.train_epoch(stream);
      return fresh.params().flat_values();
    }
    trainer.train_epoch(stream);
  }
  return model.params().flat_values();
}

TEST(Trainer, ResumeIsBitIdenticalToUninterrupted) {
  const auto clips = tiny_clips(ModelConfig::tiny(), 10);
  testing::TempDir dir;
  const auto straight = run_epochs(clips, 3, nullptr);
  const auto resumed = run_epochs(clips, 3, &dir);
  ASSERT_EQ(straight.size(), resumed.size());
  EXPECT_EQ(std::memcmp(straight.data(), resumed.data(), straight.size() * sizeof(float)), 0);
}

TEST(Trainer, EpochReducesLossOnTinyModel) {
  const ModelConfig cfg = ModelConfig::tiny();
  const auto clips = tiny_clips(cfg, 12);
  TrainConfig tc;
  tc.batch = 4;
  tc.adam.lr = 3e-3;
  FeatureCache cache;
  BatchStream stream(clips, tc.batch, cfg.feature_window, cfg.feature_hop, cache);
  UNet<float> model(cfg);
  Trainer trainer(model, tc);
  const EpochStats first = trainer.train_epoch(stream);
  EXPECT_EQ(first.steps, 3u);
  EXPECT_EQ(first.epoch, 1);
  EpochStats last = first;
  for (int e = 0; e < 30; ++e) last = trainer.train_epoch(stream);
  EXPECT_LT(last.mean_loss, first.mean_loss);
}

TEST(Trainer, SaveLoadModelAndConfigMismatch) {
  const ModelConfig cfg = ModelConfig::tiny();
  UNet<float> model(cfg);
  Rng rng(9);
  testing::randomize(model.params(), rng);
  testing::TempDir dir;
  save_model(model, dir.path());
  const auto loaded = load_model(dir.path());
  EXPECT_EQ(loaded->config().to_text(), cfg.to_text());
  const auto a = model.params().flat_values(), b = loaded->params().flat_values();
  EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)), 0);

  TrainConfig tc;
  Trainer t(model, tc);
  t.save(dir.path());
  ModelConfig other = cfg;
  other.blocks = 2;
  UNet<float> m2(other);
  Trainer t2(m2, tc);
  EXPECT_THROW(t2.resume(dir.path()), ValidationError);
}

}  // namespace
}  // namespace foley
