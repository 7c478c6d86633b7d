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

#include "foley/conditioning.h"
#include "foley/event_feature.h"
#include "foley/nn/layers.h"

namespace {

using foley::nn::Rng;
using foley::nn::Tensor;

Tensor<float> noise_tensor(int c, int l, Rng& rng) {
  Tensor<float> t(c, l);
  for (float& v : t.data) v = static_cast<float>(rng.normal());
  return t;
}

// Args: channels, length, stride.
void BM_Conv1dForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), len = static_cast<int>(state.range(1));
  const int stride = static_cast<int>(state.range(2));
  Rng rng(1);
  foley::nn::ParamStore<float> store;
  foley::nn::Conv1d<float> conv(store, "c", {c, c, 5, stride, 2}, rng);
  const Tensor<float> x = noise_tensor(c, len, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c) * len);
}
BENCHMARK(BM_Conv1dForward)->Args({16, 4000, 2})->Args({64, 1000, 2})->Args({128, 500, 1});

void BM_Conv1dBackward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), len = static_cast<int>(state.range(1));
  Rng rng(2);
  foley::nn::ParamStore<float> store;
  foley::nn::Conv1d<float> conv(store, "c", {c, c, 5, 1, 2}, rng);
  const Tensor<float> x = noise_tensor(c, len, rng);
  const Tensor<float> g = noise_tensor(c, len, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.backward(x, g));
}
BENCHMARK(BM_Conv1dBackward)->Args({16, 4000})->Args({128, 500});

void BM_ConvTranspose1dForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), len = static_cast<int>(state.range(1));
  Rng rng(3);
  foley::nn::ParamStore<float> store;
  foley::nn::ConvTranspose1d<float> conv(store, "t", {2 * c, c, 5, 2, 0}, rng);
  const Tensor<float> x = noise_tensor(2 * c, len, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_ConvTranspose1dForward)->Args({16, 2000})->Args({64, 500});

// Temporal modulation of a [128 x 500] activation by a 122-frame feature,
// N blocks.
template <typename Layer>
void modulation_bench(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  foley::nn::ParamStore<float> store;
  Layer layer(store, "m", 1, 32, 128, rng);
  const Tensor<float> x = noise_tensor(128, 500, rng);
  Tensor<float> y(1, 122);
  for (float& v : y.data) v = static_cast<float>(rng.uniform());
  for (auto _ : state) benchmark::DoNotOptimize(layer.forward(x, y, n));
}

void BM_BfilmForward(benchmark::State& state) { modulation_bench<foley::cond::Bfilm<float>>(state); }
void BM_TfilmForward(benchmark::State& state) { modulation_bench<foley::cond::Tfilm<float>>(state); }
BENCHMARK(BM_BfilmForward)->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_TfilmForward)->RangeMultiplier(2)->Range(4, 64);

void BM_ExtractRms(benchmark::State& state) {
  foley::Waveform w;
  w.sample_rate = 22050;
  w.samples.resize(88200);
  Rng rng(5);
  for (double& v : w.samples) v = 0.3 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(foley::extract_rms(w, 512, 128));
}
BENCHMARK(BM_ExtractRms);

}  // namespace
