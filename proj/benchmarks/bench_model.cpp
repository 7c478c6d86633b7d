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


#include <benchmark/benchmark.h>

#include "foley/diffusion.h"
#include "foley/unet.h"

namespace {

using foley::CondMode;
using foley::ModelConfig;
using foley::nn::Tensor;

ModelConfig toy(int64_t mode) {
  ModelConfig cfg;
  cfg.cond_mode = static_cast<CondMode>(mode);
  return cfg;
}

// Arg: CondMode (0 none, 1 film, 2 tfilm, 3 bfilm).
void BM_UNetForward(benchmark::State& state) {
  const ModelConfig cfg = toy(state.range(0));
  foley::UNet<float> model(cfg);
  foley::nn::Rng rng(1);
  Tensor<float> x(1, cfg.sample_len);
  for (float& v : x.data) v = static_cast<float>(rng.normal());
  Tensor<float> ev(1, cfg.frames(), 0.1f);
  const foley::Condition<float> c{0, &ev};
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x, 0.5, c));
  state.SetLabel(foley::cond_mode_name(cfg.cond_mode));
}
BENCHMARK(BM_UNetForward)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_UNetTrainStep(benchmark::State& state) {
  const ModelConfig cfg = toy(state.range(0));
  foley::UNet<float> model(cfg);
  foley::nn::Rng rng(2);
  Tensor<float> x(1, cfg.sample_len);
  for (float& v : x.data) v = static_cast<float>(rng.normal());
  Tensor<float> ev(1, cfg.frames(), 0.1f);
  const foley::Condition<float> c{0, &ev};
  for (auto _ : state) {
    typename foley::UNet<float>::Tape tape;
    const Tensor<float> y = model.forward(x, 0.5, c, &tape);
    benchmark::DoNotOptimize(model.backward(tape, y));
  }
  state.SetLabel(foley::cond_mode_name(cfg.cond_mode));
}
BENCHMARK(BM_UNetTrainStep)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

// Full guided sampling of one toy clip, by block count.
void BM_GenerateBlocks(benchmark::State& state) {
  ModelConfig cfg;
  cfg.blocks = static_cast<int>(state.range(0));
  foley::UNet<float> model(cfg);
  foley::EventFeature f;
  f.values.assign(cfg.frames(), 0.1);
  f.window = cfg.feature_window;
  f.hop = cfg.feature_hop;
  f.source_rate = cfg.sample_rate;
  foley::SamplerConfig sc;
  sc.steps = 10;
  for (auto _ : state) benchmark::DoNotOptimize(foley::generate(model, 0, &f, sc));
}
BENCHMARK(BM_GenerateBlocks)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
