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

#ifndef FOLEY_NN_LAYERS_H_
#define FOLEY_NN_LAYERS_H_

#include <string>
#include <vector>

#include "foley/nn/ops.h"
#include "foley/nn/params.h"
#include "foley/nn/tensor.h"

namespace foley::nn {

// Uniform(-bound, bound) fill with bound = 1/sqrt(fan_in).
template <typename T>
void init_uniform_fan_in(Param<T>& p, double fan_in, Rng& rng);

template <typename T>
void fill(Param<T>& p, T value);

// Column-wise affine map: [in x n] -> [out x n].
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore<T>& store, const std::string& name, int in, int out, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& grad_out);

  Param<T>& weight() { return *w_; }
  Param<T>& bias() { return *b_; }
  int in_features() const { return in_; }
  int out_features() const { return out_; }

  static std::size_t param_count(int in, int out) {
    return static_cast<std::size_t>(in) * out + out;
  }

 private:
  int in_ = 0;
  int out_ = 0;
  Param<T>* w_ = nullptr;
  Param<T>* b_ = nullptr;
};

template <typename T>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParamStore<T>& store, const std::string& name, ConvGeometry g, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& grad_out);

  const ConvGeometry& geometry() const { return g_; }
  Param<T>& weight() { return *w_; }
  Param<T>& bias() { return *b_; }

  static std::size_t param_count(const ConvGeometry& g) {
    return static_cast<std::size_t>(g.in_channels) * g.out_channels * g.kernel + g.out_channels;
  }

 private:
  ConvGeometry g_;
  Param<T>* w_ = nullptr;
  Param<T>* b_ = nullptr;
};

// Transposed convolution, padding 0; output length (L-1)*stride + kernel.
template <typename T>
class ConvTranspose1d {
 public:
  ConvTranspose1d() = default;
  ConvTranspose1d(ParamStore<T>& store, const std::string& name, ConvGeometry g, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& grad_out);

  const ConvGeometry& geometry() const { return g_; }
  Param<T>& weight() { return *w_; }
  Param<T>& bias() { return *b_; }

  static std::size_t param_count(const ConvGeometry& g) { return Conv1d<T>::param_count(g); }

 private:
  ConvGeometry g_;
  Param<T>* w_ = nullptr;
  Param<T>* b_ = nullptr;
};

// Affine -> activation chain; the last layer is affine only.
template <typename T>
class Mlp {
 public:
  struct Cache {
    std::vector<Tensor<T>> inputs;
    std::vector<Tensor<T>> pre;
  };

  Mlp() = default;
  Mlp(ParamStore<T>& store, const std::string& name, std::vector<int> widths,
      Activation hidden, Rng& rng);

  // x is [widths.front() x n]; each column is an independent input.
  Tensor<T> forward(const Tensor<T>& x, Cache* cache = nullptr) const;
  Tensor<T> backward(const Cache& cache, const Tensor<T>& grad_out);

  std::vector<T> operator()(const std::vector<T>& v) const;

  const std::vector<int>& widths() const { return widths_; }
  Linear<T>& layer(std::size_t i) { return layers_[i]; }
  Linear<T>& last() { return layers_.back(); }
  std::size_t depth() const { return layers_.size(); }

  static std::size_t param_count(const std::vector<int>& widths);

 private:
  std::vector<int> widths_;
  Activation hidden_ = Activation::kSilu;
  std::vector<Linear<T>> layers_;
};

}  // namespace foley::nn

#endif  // FOLEY_NN_LAYERS_H_
