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

#include "foley/conditioning.h"

#include <algorithm>
#include <limits>

#include "foley/errors.h"

namespace foley::cond {
namespace {

// Splits a [2C x n] head output into gamma (rows 0..C) and beta (rows C..2C).
template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_head(const Tensor<T>& out, int channels) {
  if (out.channels != 2 * channels) {
    throw ShapeError("modulation head produced " + out.shape_str() + ", expected " +
                     std::to_string(2 * channels) + " rows");
  }
  return nn::split_channels(out, channels);
}

template <typename T>
void set_head_identity(nn::Linear<T>& head, int channels) {
  nn::fill(head.weight(), T(0));
  for (int c = 0; c < 2 * channels; ++c) head.bias().value[c] = c < channels ? T(1) : T(0);
}

template <typename T>
void init_head_bias(nn::Linear<T>& head, int channels) {
  for (int c = 0; c < 2 * channels; ++c) head.bias().value[c] = c < channels ? T(1) : T(0);
}

}  // namespace

BlockLayout BlockLayout::make(int blocks, int cond_len, int act_len) {
  if (blocks < 1) throw DomainError("block count must be >= 1, got " + std::to_string(blocks));
  if (blocks > cond_len) {
    throw DomainError("block count " + std::to_string(blocks) + " exceeds condition length " +
                      std::to_string(cond_len));
  }
  if (blocks > act_len) {
    throw DomainError("block count " + std::to_string(blocks) + " exceeds activation length " +
                      std::to_string(act_len));
  }
  BlockLayout b;
  b.blocks = blocks;
  b.block_len_cond = (cond_len + blocks - 1) / blocks;
  b.block_len_act = (act_len + blocks - 1) / blocks;
  return b;
}

template <typename T>
Tensor<T> modulate(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                   int block_len) {
  if (gamma.channels != x.channels || !gamma.same_shape(beta)) {
    throw ShapeError("modulation params " + gamma.shape_str() + "/" + beta.shape_str() +
                     " do not match activation " + x.shape_str());
  }
  Tensor<T> y(x.channels, x.length);
  for (int c = 0; c < x.channels; ++c) {
    const T* xr = x.row(c);
    T* yr = y.row(c);
    for (int l = 0; l < x.length; ++l) {
      const int b = l / block_len;
      yr[l] = gamma(c, b) * xr[l] + beta(c, b);
    }
  }
  return y;
}

template <typename T>
Tensor<T> modulate_backward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& grad_out,
                            int block_len, Tensor<T>& grad_gamma, Tensor<T>& grad_beta) {
  grad_gamma = Tensor<T>(gamma.channels, gamma.length);
  grad_beta = Tensor<T>(gamma.channels, gamma.length);
  Tensor<T> gx(x.channels, x.length);
  for (int c = 0; c < x.channels; ++c) {
    const T* xr = x.row(c);
    const T* gr = grad_out.row(c);
    T* gxr = gx.row(c);
    for (int l = 0; l < x.length; ++l) {
      const int b = l / block_len;
      gxr[l] = gamma(c, b) * gr[l];
      grad_gamma(c, b) += gr[l] * xr[l];
      grad_beta(c, b) += gr[l];
    }
  }
  return gx;
}

template <typename T>
PooledBlocks<T> block_max_pool(const Tensor<T>& y, const BlockLayout& layout) {
  PooledBlocks<T> out;
  out.values = Tensor<T>(y.channels, layout.blocks);
  out.argmax.resize(static_cast<std::size_t>(y.channels) * layout.blocks);
  out.source_length = y.length;
  for (int c = 0; c < y.channels; ++c) {
    const T* r = y.row(c);
    for (int b = 0; b < layout.blocks; ++b) {
      T best = -std::numeric_limits<T>::infinity();
      int where = 0;
      for (int p = b * layout.block_len_cond; p < (b + 1) * layout.block_len_cond; ++p) {
        const int src = std::min(p, y.length - 1);
        if (r[src] > best) {
          best = r[src];
          where = src;
        }
      }
      out.values(c, b) = best;
      out.argmax[static_cast<std::size_t>(c) * layout.blocks + b] = where;
    }
  }
  return out;
}

template <typename T>
Tensor<T> block_max_pool_backward(const PooledBlocks<T>& pooled, const Tensor<T>& grad) {
  Tensor<T> gy(pooled.values.channels, pooled.source_length);
  const int blocks = pooled.values.length;
  for (int c = 0; c < gy.channels; ++c) {
    for (int b = 0; b < blocks; ++b) {
      gy(c, pooled.argmax[static_cast<std::size_t>(c) * blocks + b]) += grad(c, b);
    }
  }
  return gy;
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::kFilm: return "film";
    case Kind::kTfilm: return "tfilm";
    case Kind::kBfilm: return "bfilm";
  }
  return "?";
}

std::size_t count_params(const LayerSpec& s) {
  switch (s.kind) {
    case Kind::kFilm:
    case Kind::kBfilm:
      return nn::Mlp<float>::param_count({s.cond_width, s.hidden, 2 * s.channels});
    case Kind::kTfilm:
      return nn::Lstm<float>::param_count(s.cond_width, s.hidden) +
             nn::Linear<float>::param_count(s.hidden, 2 * s.channels);
  }
  return 0;
}

// ---- Film ------------------------------------------------------------------

template <typename T>
Film<T>::Film(nn::ParamStore<T>& store, const std::string& name, int cond_width, int hidden,
              int channels, nn::Rng& rng)
    : cond_width_(cond_width),
      hidden_(hidden),
      channels_(channels),
      mlp_(store, name, {cond_width, hidden, 2 * channels}, nn::Activation::kSilu, rng) {
  init_head_bias(mlp_.last(), channels_);
}

template <typename T>
Tensor<T> Film<T>::forward(const Tensor<T>& x, const Tensor<T>& cond, Cache* cache) const {
  if (cond.channels != cond_width_ || cond.length != 1) {
    throw ShapeError("film condition " + cond.shape_str() + ", expected [" +
                     std::to_string(cond_width_) + " x 1]");
  }
  if (x.channels != channels_) {
    throw ShapeError("film activation " + x.shape_str() + ", expected " +
                     std::to_string(channels_) + " channels");
  }
  auto [gamma, beta] = split_head(mlp_.forward(cond, cache ? &cache->mlp : nullptr), channels_);
  Tensor<T> y = modulate(x, gamma, beta, x.length);
  if (cache) {
    cache->x = x;
    cache->gamma = std::move(gamma);
    cache->beta = std::move(beta);
  }
  return y;
}

template <typename T>
LayerGrads<T> Film<T>::backward(const Cache& cache, const Tensor<T>& grad_out) {
  Tensor<T> gg, gb;
  LayerGrads<T> g;
  g.x = modulate_backward(cache.x, cache.gamma, grad_out, cache.x.length, gg, gb);
  g.cond = mlp_.backward(cache.mlp, nn::concat_channels(gg, gb));
  return g;
}

template <typename T>
void Film<T>::set_identity() {
  set_head_identity(mlp_.last(), channels_);
}

// ---- Bfilm -----------------------------------------------------------------

template <typename T>
Bfilm<T>::Bfilm(nn::ParamStore<T>& store, const std::string& name, int cond_channels, int hidden,
                int channels, nn::Rng& rng)
    : cond_channels_(cond_channels),
      hidden_(hidden),
      channels_(channels),
      mlp_(store, name, {cond_channels, hidden, 2 * channels}, nn::Activation::kSilu, rng) {
  init_head_bias(mlp_.last(), channels_);
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> Bfilm<T>::modulation(const Tensor<T>& y, int blocks,
                                                     int act_len) const {
  if (y.channels != cond_channels_) {
    throw ShapeError("bfilm condition " + y.shape_str() + ", expected " +
                     std::to_string(cond_channels_) + " channels");
  }
  const BlockLayout layout = BlockLayout::make(blocks, y.length, act_len);
  return split_head(mlp_.forward(block_max_pool(y, layout).values), channels_);
}

template <typename T>
Tensor<T> Bfilm<T>::forward(const Tensor<T>& x, const Tensor<T>& y, int blocks,
                            Cache* cache) const {
  if (y.channels != cond_channels_) {
    throw ShapeError("bfilm condition " + y.shape_str() + ", expected " +
                     std::to_string(cond_channels_) + " channels");
  }
  if (x.channels != channels_) {
    throw ShapeError("bfilm activation " + x.shape_str() + ", expected " +
                     std::to_string(channels_) + " channels");
  }
  const BlockLayout layout = BlockLayout::make(blocks, y.length, x.length);
  PooledBlocks<T> pooled = block_max_pool(y, layout);
  auto [gamma, beta] =
      split_head(mlp_.forward(pooled.values, cache ? &cache->mlp : nullptr), channels_);
  Tensor<T> out = modulate(x, gamma, beta, layout.block_len_act);
  if (cache) {
    cache->x = x;
    cache->pooled = std::move(pooled);
    cache->gamma = std::move(gamma);
    cache->beta = std::move(beta);
    cache->layout = layout;
  }
  return out;
}

template <typename T>
LayerGrads<T> Bfilm<T>::backward(const Cache& cache, const Tensor<T>& grad_out) {
  Tensor<T> gg, gb;
  LayerGrads<T> g;
  g.x = modulate_backward(cache.x, cache.gamma, grad_out, cache.layout.block_len_act, gg, gb);
  Tensor<T> gpool = mlp_.backward(cache.mlp, nn::concat_channels(gg, gb));
  g.cond = block_max_pool_backward(cache.pooled, gpool);
  return g;
}

template <typename T>
void Bfilm<T>::set_identity() {
  set_head_identity(mlp_.last(), channels_);
}

// ---- Tfilm -----------------------------------------------------------------

template <typename T>
Tfilm<T>::Tfilm(nn::ParamStore<T>& store, const std::string& name, int cond_channels, int hidden,
                int channels, nn::Rng& rng)
    : cond_channels_(cond_channels),
      hidden_(hidden),
      channels_(channels),
      rnn_(store, name + ".rnn", cond_channels, hidden, rng),
      head_(store, name + ".head", hidden, 2 * channels, rng) {
  init_head_bias(head_, channels_);
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> Tfilm<T>::modulation(const Tensor<T>& y, int blocks,
                                                     int act_len) const {
  if (y.channels != cond_channels_) {
    throw ShapeError("tfilm condition " + y.shape_str() + ", expected " +
                     std::to_string(cond_channels_) + " channels");
  }
  const BlockLayout layout = BlockLayout::make(blocks, y.length, act_len);
  return split_head(head_.forward(rnn_.forward(block_max_pool(y, layout).values)), channels_);
}

template <typename T>
Tensor<T> Tfilm<T>::forward(const Tensor<T>& x, const Tensor<T>& y, int blocks,
                            Cache* cache) const {
  if (y.channels != cond_channels_) {
    throw ShapeError("tfilm condition " + y.shape_str() + ", expected " +
                     std::to_string(cond_channels_) + " channels");
  }
  if (x.channels != channels_) {
    throw ShapeError("tfilm activation " + x.shape_str() + ", expected " +
                     std::to_string(channels_) + " channels");
  }
  const BlockLayout layout = BlockLayout::make(blocks, y.length, x.length);
  PooledBlocks<T> pooled = block_max_pool(y, layout);
  Tensor<T> h = rnn_.forward(pooled.values, cache ? &cache->lstm : nullptr);
  auto [gamma, beta] = split_head(head_.forward(h), channels_);
  Tensor<T> out = modulate(x, gamma, beta, layout.block_len_act);
  if (cache) {
    cache->x = x;
    cache->pooled = std::move(pooled);
    cache->hidden = std::move(h);
    cache->gamma = std::move(gamma);
    cache->beta = std::move(beta);
    cache->layout = layout;
  }
  return out;
}

template <typename T>
LayerGrads<T> Tfilm<T>::backward(const Cache& cache, const Tensor<T>& grad_out) {
  Tensor<T> gg, gb;
  LayerGrads<T> g;
  g.x = modulate_backward(cache.x, cache.gamma, grad_out, cache.layout.block_len_act, gg, gb);
  Tensor<T> gh = head_.backward(cache.hidden, nn::concat_channels(gg, gb));
  Tensor<T> gpool = rnn_.backward(cache.lstm, gh);
  g.cond = block_max_pool_backward(cache.pooled, gpool);
  return g;
}

template <typename T>
void Tfilm<T>::set_identity() {
  set_head_identity(head_, channels_);
}

#define FOLEY_INSTANTIATE_COND(T)                                                          \
  template Tensor<T> modulate(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int);  \
  template Tensor<T> modulate_backward(const Tensor<T>&, const Tensor<T>&,                 \
                                       const Tensor<T>&, int, Tensor<T>&, Tensor<T>&);     \
  template PooledBlocks<T> block_max_pool(const Tensor<T>&, const BlockLayout&);           \
  template Tensor<T> block_max_pool_backward(const PooledBlocks<T>&, const Tensor<T>&);    \
  template class Film<T>;                                                                  \
  template class Bfilm<T>;                                                                 \
  template class Tfilm<T>;

FOLEY_INSTANTIATE_COND(float)
FOLEY_INSTANTIATE_COND(double)

}  // namespace foley::cond
