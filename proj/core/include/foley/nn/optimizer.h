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

#ifndef FOLEY_NN_OPTIMIZER_H_
#define FOLEY_NN_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "foley/nn/checkpoint.h"
#include "foley/nn/params.h"

namespace foley::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Global L2 norm clip; <= 0 disables.
  double clip_norm = 1.0;
};

// Adam over every parameter of a store, in registration order.
template <typename T>
class Adam {
 public:
  Adam(ParamStore<T>& store, AdamConfig cfg);

  // Applies one update from the current gradients (scaled by `grad_scale`
  // first) and returns the pre-clip gradient norm.
  double step(double grad_scale = 1.0);

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  // Moment buffers as named arrays ("adam.m/<param>", "adam.v/<param>").
  std::vector<NamedArray> state() const;
  void load_state(const std::vector<NamedArray>& arrays, std::uint64_t steps);

 private:
  ParamStore<T>& store_;
  AdamConfig cfg_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  std::uint64_t t_ = 0;
};

}  // namespace foley::nn

#endif  // FOLEY_NN_OPTIMIZER_H_
