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

#include "foley/nn/layers.h"

#include <algorithm>
#include <cmath>

#include "foley/errors.h"

namespace foley::nn {

template <typename T>
void init_uniform_fan_in(Param<T>& p, double fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(std::max(fan_in, 1.0));
  for (T& v : p.value) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
void fill(Param<T>& p, T value) {
  std::fill(p.value.begin(), p.value.end(), value);
}

template <typename T>
Linear<T>::Linear(ParamStore<T>& store, const std::string& name, int in, int out, Rng& rng)
    : in_(in), out_(out) {
  if (in < 1 || out < 1) throw ShapeError("linear layer " + name + " needs positive widths");
  w_ = &store.add(name + ".weight", {out, in});
  b_ = &store.add(name + ".bias", {out});
  init_uniform_fan_in(*w_, in, rng);
  init_uniform_fan_in(*b_, in, rng);
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x) const {
  if (x.channels != in_) {
    throw ShapeError("linear expects " + std::to_string(in_) + " features, got " + x.shape_str());
  }
  return affine<T>(x, w_->value, b_->value, out_);
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
  return affine_backward<T>(x, grad_out, w_->value, w_->grad, b_->grad);
}

template <typename T>
Conv1d<T>::Conv1d(ParamStore<T>& store, const std::string& name, ConvGeometry g, Rng& rng)
    : g_(g) {
  w_ = &store.add(name + ".weight", {g.out_channels, g.in_channels, g.kernel});
  b_ = &store.add(name + ".bias", {g.out_channels});
  const double fan_in = static_cast<double>(g.in_channels) * g.kernel;
  init_uniform_fan_in(*w_, fan_in, rng);
  init_uniform_fan_in(*b_, fan_in, rng);
}

template <typename T>
Tensor<T> Conv1d<T>::forward(const Tensor<T>& x) const {
  return conv1d<T>(x, w_->value, b_->value, g_);
}

template <typename T>
Tensor<T> Conv1d<T>::backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
  return conv1d_backward<T>(x, grad_out, w_->value, w_->grad, b_->grad, g_);
}

template <typename T>
ConvTranspose1d<T>::ConvTranspose1d(ParamStore<T>& store, const std::string& name,
                                    ConvGeometry g, Rng& rng)
    : g_(g) {
  w_ = &store.add(name + ".weight", {g.in_channels, g.out_channels, g.kernel});
  b_ = &store.add(name + ".bias", {g.out_channels});
  const double fan_in = static_cast<double>(g.in_channels) * g.kernel / g.stride;
  init_uniform_fan_in(*w_, fan_in, rng);
  init_uniform_fan_in(*b_, fan_in, rng);
}

template <typename T>
Tensor<T> ConvTranspose1d<T>::forward(const Tensor<T>& x) const {
  return conv1d_transposed<T>(x, w_->value, b_->value, g_);
}

template <typename T>
Tensor<T> ConvTranspose1d<T>::backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
  return conv1d_transposed_backward<T>(x, grad_out, w_->value, w_->grad, b_->grad, g_);
}

template <typename T>
Mlp<T>::Mlp(ParamStore<T>& store, const std::string& name, std::vector<int> widths,
            Activation hidden, Rng& rng)
    : widths_(std::move(widths)), hidden_(hidden) {
  if (widths_.size() < 2) throw ShapeError("mlp " + name + " needs at least two widths");
  for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
    layers_.emplace_back(store, name + "." + std::to_string(i), widths_[i], widths_[i + 1], rng);
  }
}

template <typename T>
Tensor<T> Mlp<T>::forward(const Tensor<T>& x, Cache* cache) const {
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Tensor<T> h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Tensor<T> pre = layers_[i].forward(h);
    const bool last = i + 1 == layers_.size();
    if (cache) cache->inputs.push_back(std::move(h));
    if (last) {
      h = std::move(pre);
    } else {
      h = activate(hidden_, pre);
      if (cache) cache->pre.push_back(std::move(pre));
    }
  }
  return h;
}

template <typename T>
Tensor<T> Mlp<T>::backward(const Cache& cache, const Tensor<T>& grad_out) {
  Tensor<T> g = grad_out;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) g = activate_backward(hidden_, cache.pre[k], g);
    g = layers_[k].backward(cache.inputs[k], g);
  }
  return g;
}

template <typename T>
std::vector<T> Mlp<T>::operator()(const std::vector<T>& v) const {
  if (static_cast<int>(v.size()) != widths_.front()) {
    throw ShapeError("mlp expects input width " + std::to_string(widths_.front()) + ", got " +
                     std::to_string(v.size()));
  }
  Tensor<T> x(widths_.front(), 1);
  std::copy(v.begin(), v.end(), x.data.begin());
  const Tensor<T> y = forward(x);
  return {y.data.begin(), y.data.end()};
}

template <typename T>
std::size_t Mlp<T>::param_count(const std::vector<int>& widths) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    n += Linear<T>::param_count(widths[i], widths[i + 1]);
  }
  return n;
}

template void init_uniform_fan_in(Param<float>&, double, Rng&);
template void init_uniform_fan_in(Param<double>&, double, Rng&);
template void fill(Param<float>&, float);
template void fill(Param<double>&, double);
template class Linear<float>;
template class Linear<double>;
template class Conv1d<float>;
template class Conv1d<double>;
template class ConvTranspose1d<float>;
template class ConvTranspose1d<double>;
template class Mlp<float>;
template class Mlp<double>;

}  // namespace foley::nn
