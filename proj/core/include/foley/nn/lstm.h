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

#ifndef FOLEY_NN_LSTM_H_
#define FOLEY_NN_LSTM_H_

#include <string>

#include "foley/nn/params.h"
#include "foley/nn/tensor.h"

namespace foley::nn {

// Single-direction LSTM over the time axis of a [input x L] tensor. Gate
// order in the stacked weights is input, forget, cell, output. State starts
// at zero.
template <typename T>
class Lstm {
 public:
  struct Cache {
    Tensor<T> x;
    std::vector<T> gates;  // time-major [L x 4H], post-activation
    std::vector<T> cell;   // time-major [L x H]
    std::vector<T> hidden; // time-major [L x H]
  };

  Lstm() = default;
  Lstm(ParamStore<T>& store, const std::string& name, int input, int hidden, Rng& rng);

  // Returns [hidden x L].
  Tensor<T> forward(const Tensor<T>& x, Cache* cache = nullptr) const;
  Tensor<T> backward(const Cache& cache, const Tensor<T>& grad_h);

  int input_size() const { return input_; }
  int hidden_size() const { return hidden_; }
  Param<T>& w_ih() { return *w_ih_; }
  Param<T>& w_hh() { return *w_hh_; }
  Param<T>& bias() { return *b_; }

  static std::size_t param_count(int input, int hidden) {
    return 4 * static_cast<std::size_t>(hidden) * (input + hidden + 1);
  }

 private:
  int input_ = 0;
  int hidden_ = 0;
  Param<T>* w_ih_ = nullptr;
  Param<T>* w_hh_ = nullptr;
  Param<T>* b_ = nullptr;
};

// Forward pass over x and a second LSTM over time-reversed x; outputs are
// stacked as [forward; backward] giving 2*hidden channels.
template <typename T>
class BiLstm {
 public:
  struct Cache {
    typename Lstm<T>::Cache fwd;
    typename Lstm<T>::Cache bwd;
  };

  BiLstm() = default;
  BiLstm(ParamStore<T>& store, const std::string& name, int input, int hidden, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x, Cache* cache = nullptr) const;
  Tensor<T> backward(const Cache& cache, const Tensor<T>& grad_out);

  Lstm<T>& forward_cell() { return fwd_; }
  Lstm<T>& backward_cell() { return bwd_; }
  int hidden_size() const { return fwd_.hidden_size(); }

  static std::size_t param_count(int input, int hidden) {
    return 2 * Lstm<T>::param_count(input, hidden);
  }

 private:
  Lstm<T> fwd_;
  Lstm<T> bwd_;
};

}  // namespace foley::nn

#endif  // FOLEY_NN_LSTM_H_
