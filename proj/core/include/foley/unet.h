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

#ifndef FOLEY_UNET_H_
#define FOLEY_UNET_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foley/conditioning.h"
#include "foley/model_config.h"
#include "foley/nn/layers.h"
#include "foley/nn/lstm.h"
#include "foley/nn/params.h"
#include "foley/nn/tensor.h"

namespace foley {

using nn::Tensor;

// Fixed sinusoidal embedding of diffusion time t in [0, 1]:
// [sin(w_k t)..., cos(w_k t)...] with w_k log-spaced over [1, 500].
std::vector<double> sigma_embedding(double t, int dim);

// Conditioning of one forward pass. A missing class selects the learned
// null class row; a missing event sequence selects the learned null
// sequence. `bypass_temporal` skips temporal modulation entirely (gamma=1,
// beta=0), which tests use to isolate the other paths.
template <typename T>
struct Condition {
  std::optional<int> class_id;
  const Tensor<T>* events = nullptr;
  bool bypass_temporal = false;
};

namespace detail {

// One Down or Up block:
//   a = act(FiLM_{sigma,class}(conv_a(in)))     conv_a strided (Down) or
//                                               transposed + cropped (Up)
//   b = act(temporal(conv_b(a)))
//   out = a + b
template <typename T>
class Block {
 public:
  struct Cache {
    Tensor<T> in;
    int conv_len = 0;
    typename cond::Film<T>::Cache film;
    Tensor<T> a_pre;
    Tensor<T> a;
    Tensor<T> b_conv;
    Tensor<T> b_pre;
    typename cond::Film<T>::Cache t_film;
    typename cond::Tfilm<T>::Cache t_tfilm;
    typename cond::Bfilm<T>::Cache t_bfilm;
    bool temporal_applied = false;
  };

  Block() = default;
  Block(nn::ParamStore<T>& store, const std::string& name, bool up, int in_ch, int out_ch,
        int stride, const ModelConfig& cfg, bool temporal, nn::Rng& rng);

  Tensor<T> forward(const Tensor<T>& in, const Tensor<T>& cond_vec, const Tensor<T>* events,
                    int blocks, Cache* cache) const;
  // Returns dL/d(in); adds into grad_cond and (when temporal ran) grad_events.
  Tensor<T> backward(const Cache& cache, const Tensor<T>& grad_out, Tensor<T>& grad_cond,
                     Tensor<T>* grad_events);

  CondMode temporal_mode() const { return temporal_; }
  int out_channels() const { return out_ch_; }

 private:
  bool up_ = false;
  int in_ch_ = 0;
  int out_ch_ = 0;
  int stride_ = 1;
  int crop_offset_ = 0;
  nn::Activation act_ = nn::Activation::kSilu;
  CondMode temporal_ = CondMode::kNone;
  nn::Conv1d<T> down_conv_;
  nn::ConvTranspose1d<T> up_conv_;
  cond::Film<T> film_;
  nn::Conv1d<T> conv_b_;
  cond::Film<T> t_film_;
  cond::Tfilm<T> t_tfilm_;
  cond::Bfilm<T> t_bfilm_;
};

}  // namespace detail

// Noise-prediction U-Net: strided-conv Down blocks, a BiLSTM bottleneck with
// a residual linear projection, transposed-conv Up blocks fed by
// concatenated skips, and a 1x1 output head. Every block is FiLM-conditioned
// on (diffusion time, class) and, depending on cond_mode and placement,
// temporally modulated by the event feature.
template <typename T>
class UNet {
 public:
  struct BottleneckCache {
    typename nn::BiLstm<T>::Cache lstm;
    Tensor<T> lstm_out;
  };

  struct Tape {
    Tensor<T> cond_vec;
    int class_row = 0;
    bool null_events = false;
    bool temporal_on = false;
    Tensor<T> events;
    std::vector<typename detail::Block<T>::Cache> down;
    BottleneckCache bottleneck;
    std::vector<typename detail::Block<T>::Cache> up;
    std::vector<int> up_input_split;
    Tensor<T> head_in;
  };

  struct InputGrads {
    Tensor<T> x;
    Tensor<T> events;  // empty unless real events were supplied
  };

  explicit UNet(ModelConfig cfg);
  UNet(const UNet&) = delete;
  UNet& operator=(const UNet&) = delete;

  // x is [1 x sample_len]; returns the predicted noise with the same shape.
  Tensor<T> forward(const Tensor<T>& x, double t, const Condition<T>& cond,
                    Tape* tape = nullptr) const;
  // Accumulates parameter gradients.
  InputGrads backward(const Tape& tape, const Tensor<T>& grad_out);

  // h + proj(BiLSTM(h)).
  Tensor<T> bottleneck(const Tensor<T>& h, BottleneckCache* cache = nullptr) const;
  Tensor<T> bottleneck_backward(const BottleneckCache& cache, const Tensor<T>& grad_out);

  nn::ParamStore<T>& params() { return store_; }
  const nn::ParamStore<T>& params() const { return store_; }
  const ModelConfig& config() const { return cfg_; }

  nn::BiLstm<T>& bottleneck_lstm() { return lstm_; }
  nn::Conv1d<T>& bottleneck_proj() { return proj_; }
  nn::Conv1d<T>& head() { return head_; }

  // Parameter totals grouped by top-level module name, in creation order.
  std::vector<std::pair<std::string, std::size_t>> module_param_counts() const;

 private:
  Tensor<T> make_cond_vec(double t, int class_row) const;

  ModelConfig cfg_;
  nn::ParamStore<T> store_;
  std::vector<detail::Block<T>> down_;
  std::vector<detail::Block<T>> up_;  // indexed by level
  nn::BiLstm<T> lstm_;
  nn::Conv1d<T> proj_;
  nn::Conv1d<T> head_;
  nn::Param<T>* class_embed_ = nullptr;
  nn::Param<T>* null_events_ = nullptr;
};

// Human-readable summary of a config plus its exact trainable parameter
// count (per module and total).
struct ModelDescription {
  std::string text;
  std::size_t total_params = 0;
  std::vector<std::pair<std::string, std::size_t>> modules;
};

ModelDescription describe(const ModelConfig& cfg);

}  // namespace foley

#endif  // FOLEY_UNET_H_
