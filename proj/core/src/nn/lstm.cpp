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

#include "foley/nn/lstm.h"

#include <Eigen/Core>
#include <cmath>

#include "foley/errors.h"
#include "foley/nn/layers.h"
#include "foley/nn/ops.h"

namespace foley::nn {
namespace {

template <typename T>
using ColMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using CMapRow = Eigen::Map<const RowMat<T>>;
template <typename T>
using MapRow = Eigen::Map<RowMat<T>>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

}  // namespace

template <typename T>
Lstm<T>::Lstm(ParamStore<T>& store, const std::string& name, int input, int hidden, Rng& rng)
    : input_(input), hidden_(hidden) {
  if (input < 1 || hidden < 1) throw ShapeError("lstm " + name + " needs positive sizes");
  w_ih_ = &store.add(name + ".w_ih", {4 * hidden, input});
  w_hh_ = &store.add(name + ".w_hh", {4 * hidden, hidden});
  b_ = &store.add(name + ".bias", {4 * hidden});
  init_uniform_fan_in(*w_ih_, hidden, rng);
  init_uniform_fan_in(*w_hh_, hidden, rng);
  init_uniform_fan_in(*b_, hidden, rng);
}

template <typename T>
Tensor<T> Lstm<T>::forward(const Tensor<T>& x, Cache* cache) const {
  if (x.channels != input_) {
    throw ShapeError("lstm expects " + std::to_string(input_) + " input channels, got " +
                     x.shape_str());
  }
  const int H = hidden_;
  const int L = x.length;
  // Input contribution for every step at once: column t is W_ih x_t + b.
  ColMat<T> zx = CMapRow<T>(w_ih_->value.data(), 4 * H, input_) *
                 CMapRow<T>(x.data.data(), input_, L);
  const Eigen::Map<const Vec<T>> bias(b_->value.data(), 4 * H);
  const CMapRow<T> whh(w_hh_->value.data(), 4 * H, H);

  std::vector<T> gates(static_cast<std::size_t>(L) * 4 * H);
  std::vector<T> cell(static_cast<std::size_t>(L) * H);
  std::vector<T> hid(static_cast<std::size_t>(L) * H);
  Vec<T> h = Vec<T>::Zero(H);
  Vec<T> c = Vec<T>::Zero(H);
  Vec<T> z(4 * H);
  for (int t = 0; t < L; ++t) {
    z.noalias() = zx.col(t) + bias;
    z.noalias() += whh * h;
    T* g = gates.data() + static_cast<std::size_t>(t) * 4 * H;
    for (int k = 0; k < H; ++k) {
      const T ig = sigmoid(z[k]);
      const T fg = sigmoid(z[H + k]);
      const T gg = std::tanh(z[2 * H + k]);
      const T og = sigmoid(z[3 * H + k]);
      g[k] = ig;
      g[H + k] = fg;
      g[2 * H + k] = gg;
      g[3 * H + k] = og;
      c[k] = fg * c[k] + ig * gg;
      h[k] = og * std::tanh(c[k]);
    }
    std::copy_n(c.data(), H, cell.data() + static_cast<std::size_t>(t) * H);
    std::copy_n(h.data(), H, hid.data() + static_cast<std::size_t>(t) * H);
  }

  Tensor<T> out(H, L);
  for (int t = 0; t < L; ++t) {
    for (int k = 0; k < H; ++k) out(k, t) = hid[static_cast<std::size_t>(t) * H + k];
  }
  if (cache) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->cell = std::move(cell);
    cache->hidden = std::move(hid);
  }
  return out;
}

template <typename T>
Tensor<T> Lstm<T>::backward(const Cache& cache, const Tensor<T>& grad_h) {
  const int H = hidden_;
  const int L = cache.x.length;
  if (grad_h.channels != H || grad_h.length != L) {
    throw ShapeError("lstm backward grad " + grad_h.shape_str());
  }
  const CMapRow<T> whh(w_hh_->value.data(), 4 * H, H);
  ColMat<T> dz(4 * H, L);
  ColMat<T> h_prev(H, L);
  Vec<T> dh_next = Vec<T>::Zero(H);
  Vec<T> dc_next = Vec<T>::Zero(H);
  for (int t = L - 1; t >= 0; --t) {
    const T* g = cache.gates.data() + static_cast<std::size_t>(t) * 4 * H;
    const T* c = cache.cell.data() + static_cast<std::size_t>(t) * H;
    const T* cp = t > 0 ? cache.cell.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
    for (int k = 0; k < H; ++k) {
      const T ig = g[k], fg = g[H + k], gg = g[2 * H + k], og = g[3 * H + k];
      const T tc = std::tanh(c[k]);
      const T dh = grad_h(k, t) + dh_next[k];
      const T dc = dh * og * (T(1) - tc * tc) + dc_next[k];
      const T c_prev = cp ? cp[k] : T(0);
      dz(k, t) = dc * gg * ig * (T(1) - ig);
      dz(H + k, t) = dc * c_prev * fg * (T(1) - fg);
      dz(2 * H + k, t) = dc * ig * (T(1) - gg * gg);
      dz(3 * H + k, t) = dh * tc * og * (T(1) - og);
      dc_next[k] = dc * fg;
      h_prev(k, t) = t > 0 ? cache.hidden[static_cast<std::size_t>(t - 1) * H + k] : T(0);
    }
    dh_next.noalias() = whh.transpose() * dz.col(t);
  }

  MapRow<T>(w_hh_->grad.data(), 4 * H, H).noalias() += dz * h_prev.transpose();
  const CMapRow<T> xm(cache.x.data.data(), input_, L);
  MapRow<T>(w_ih_->grad.data(), 4 * H, input_).noalias() += dz * xm.transpose();
  Eigen::Map<Vec<T>>(b_->grad.data(), 4 * H) += dz.rowwise().sum();

  Tensor<T> gx(input_, L);
  MapRow<T>(gx.data.data(), input_, L).noalias() =
      CMapRow<T>(w_ih_->value.data(), 4 * H, input_).transpose() * dz;
  return gx;
}

template <typename T>
BiLstm<T>::BiLstm(ParamStore<T>& store, const std::string& name, int input, int hidden, Rng& rng)
    : fwd_(store, name + ".fwd", input, hidden, rng), bwd_(store, name + ".bwd", input, hidden, rng) {}

template <typename T>
Tensor<T> BiLstm<T>::forward(const Tensor<T>& x, Cache* cache) const {
  Tensor<T> f = fwd_.forward(x, cache ? &cache->fwd : nullptr);
  Tensor<T> b = flip_time(bwd_.forward(flip_time(x), cache ? &cache->bwd : nullptr));
  return concat_channels(f, b);
}

template <typename T>
Tensor<T> BiLstm<T>::backward(const Cache& cache, const Tensor<T>& grad_out) {
  auto [gf, gb] = split_channels(grad_out, fwd_.hidden_size());
  Tensor<T> gx = fwd_.backward(cache.fwd, gf);
  add_inplace(gx, flip_time(bwd_.backward(cache.bwd, flip_time(gb))));
  return gx;
}

template class Lstm<float>;
template class Lstm<double>;
template class BiLstm<float>;
template class BiLstm<double>;

}  // namespace foley::nn
