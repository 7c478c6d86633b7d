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

#ifndef FOLEY_CONDITIONING_H_
#define FOLEY_CONDITIONING_H_

#include <cstddef>
#include <string>
#include <vector>

#include "foley/nn/layers.h"
#include "foley/nn/lstm.h"
#include "foley/nn/params.h"
#include "foley/nn/tensor.h"

// Feature-wise affine modulation layers. All three map a conditioning input
// to per-channel (gamma, beta) and compute gamma * x + beta:
//
//   Film   one (gamma, beta) pair from an MLP over a conditioning vector.
//   Tfilm  the condition sequence y is split into N blocks, each block is
//          max-pooled over time, an LSTM runs over the N pooled vectors and a
//          linear head emits (gamma_i, beta_i) for activation block i.
//   Bfilm  like Tfilm but each pooled block goes through one shared MLP
//          independently, so block i of the output depends only on block i
//          of the condition.
//
// y ([C_in x L_in]) and x ([C_out x L_out]) may differ in both size and
// length. Each is right-padded by repeating its last column to a multiple
// of N; padding on the activation side is dropped from the output.
namespace foley::cond {

using nn::Tensor;

struct BlockLayout {
  int blocks = 1;
  int block_len_cond = 1;
  int block_len_act = 1;

  // Throws DomainError when blocks < 1 or exceeds either length.
  static BlockLayout make(int blocks, int cond_len, int act_len);
};

// out(c, l) = gamma(c, l / block_len) * x(c, l) + beta(c, l / block_len)
template <typename T>
Tensor<T> modulate(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                   int block_len);

template <typename T>
Tensor<T> modulate_backward(const Tensor<T>& x, const Tensor<T>& gamma,
                            const Tensor<T>& grad_out, int block_len, Tensor<T>& grad_gamma,
                            Tensor<T>& grad_beta);

template <typename T>
struct PooledBlocks {
  Tensor<T> values;          // [C_in x N]
  std::vector<int> argmax;   // source column per (channel, block)
  int source_length = 0;
};

template <typename T>
PooledBlocks<T> block_max_pool(const Tensor<T>& y, const BlockLayout& layout);

template <typename T>
Tensor<T> block_max_pool_backward(const PooledBlocks<T>& pooled, const Tensor<T>& grad);

enum class Kind { kFilm, kTfilm, kBfilm };

std::string kind_name(Kind k);

// Widths that determine a layer's parameter count.
struct LayerSpec {
  Kind kind = Kind::kBfilm;
  int cond_width = 0;  // conditioning vector width (Film) or channels C_in
  int hidden = 0;      // MLP hidden width or LSTM hidden size
  int channels = 0;    // modulated channels C_out
};

std::size_t count_params(const LayerSpec& spec);

template <typename T>
struct LayerGrads {
  Tensor<T> x;
  Tensor<T> cond;
};

template <typename T>
class Film {
 public:
  struct Cache {
    Tensor<T> x;
    typename nn::Mlp<T>::Cache mlp;
    Tensor<T> gamma;
    Tensor<T> beta;
  };

  Film() = default;
  Film(nn::ParamStore<T>& store, const std::string& name, int cond_width, int hidden,
       int channels, nn::Rng& rng);

  // cond is [cond_width x 1].
  Tensor<T> forward(const Tensor<T>& x, const Tensor<T>& cond, Cache* cache = nullptr) const;
  LayerGrads<T> backward(const Cache& cache, const Tensor<T>& grad_out);

  // Final layer weights 0, bias gamma = 1 / beta = 0.
  void set_identity();
  nn::Mlp<T>& mlp() { return mlp_; }
  int channels() const { return channels_; }
  LayerSpec spec() const { return {Kind::kFilm, cond_width_, hidden_, channels_}; }

 private:
  int cond_width_ = 0;
  int hidden_ = 0;
  int channels_ = 0;
  nn::Mlp<T> mlp_;
};

template <typename T>
class Bfilm {
 public:
  struct Cache {
    Tensor<T> x;
    PooledBlocks<T> pooled;
    typename nn::Mlp<T>::Cache mlp;
    Tensor<T> gamma;
    Tensor<T> beta;
    BlockLayout layout;
  };

  Bfilm() = default;
  Bfilm(nn::ParamStore<T>& store, const std::string& name, int cond_channels, int hidden,
        int channels, nn::Rng& rng);

  Tensor<T> forward(const Tensor<T>& x, const Tensor<T>& y, int blocks,
                    Cache* cache = nullptr) const;
  LayerGrads<T> backward(const Cache& cache, const Tensor<T>& grad_out);

  // Per-block (gamma, beta) as [C_out x N] each.
  std::pair<Tensor<T>, Tensor<T>> modulation(const Tensor<T>& y, int blocks, int act_len) const;

  void set_identity();
  nn::Mlp<T>& mlp() { return mlp_; }
  LayerSpec spec() const { return {Kind::kBfilm, cond_channels_, hidden_, channels_}; }

 private:
  int cond_channels_ = 0;
  int hidden_ = 0;
  int channels_ = 0;
  nn::Mlp<T> mlp_;
};

template <typename T>
class Tfilm {
 public:
  struct Cache {
    Tensor<T> x;
    PooledBlocks<T> pooled;
    typename nn::Lstm<T>::Cache lstm;
    Tensor<T> hidden;
    Tensor<T> gamma;
    Tensor<T> beta;
    BlockLayout layout;
  };

  Tfilm() = default;
  Tfilm(nn::ParamStore<T>& store, const std::string& name, int cond_channels, int hidden,
        int channels, nn::Rng& rng);

  Tensor<T> forward(const Tensor<T>& x, const Tensor<T>& y, int blocks,
                    Cache* cache = nullptr) const;
  LayerGrads<T> backward(const Cache& cache, const Tensor<T>& grad_out);

  std::pair<Tensor<T>, Tensor<T>> modulation(const Tensor<T>& y, int blocks, int act_len) const;

  void set_identity();
  nn::Lstm<T>& rnn() { return rnn_; }
  nn::Linear<T>& head() { return head_; }
  LayerSpec spec() const { return {Kind::kTfilm, cond_channels_, hidden_, channels_}; }

 private:
  int cond_channels_ = 0;
  int hidden_ = 0;
  int channels_ = 0;
  nn::Lstm<T> rnn_;
  nn::Linear<T> head_;
};

}  // namespace foley::cond

#endif  // FOLEY_CONDITIONING_H_
