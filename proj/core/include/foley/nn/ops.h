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

#ifndef FOLEY_NN_OPS_H_
#define FOLEY_NN_OPS_H_

#include <span>
#include <utility>

#include "foley/nn/tensor.h"

namespace foley::nn {

struct ConvGeometry {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
};

// floor((length + 2*padding - kernel) / stride) + 1
int conv1d_output_length(int length, int kernel, int stride, int padding);
// (length - 1) * stride + kernel
int conv1d_transposed_output_length(int length, int kernel, int stride);

// Cross-correlation. weight is [out, in, kernel]; bias is [out] or empty.
template <typename T>
Tensor<T> conv1d(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias,
                 const ConvGeometry& g);

// Accumulates into grad_weight / grad_bias and returns dL/dx.
template <typename T>
Tensor<T> conv1d_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                          std::span<const T> weight, std::span<T> grad_weight,
                          std::span<T> grad_bias, const ConvGeometry& g);

// Adjoint of conv1d with padding 0. weight is [in, out, kernel], i.e. the
// same memory as the conv1d weight that maps `out` channels to `in`.
template <typename T>
Tensor<T> conv1d_transposed(const Tensor<T>& x, std::span<const T> weight,
                            std::span<const T> bias, const ConvGeometry& g);

template <typename T>
Tensor<T> conv1d_transposed_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                                     std::span<const T> weight, std::span<T> grad_weight,
                                     std::span<T> grad_bias, const ConvGeometry& g);

// y[out x n] = W[out x in] x[in x n] + b
template <typename T>
Tensor<T> affine(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias,
                 int out_features);

template <typename T>
Tensor<T> affine_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                          std::span<const T> weight, std::span<T> grad_weight,
                          std::span<T> grad_bias);

enum class Activation { kIdentity, kSilu, kTanh };

template <typename T>
Tensor<T> activate(Activation a, const Tensor<T>& pre);

// Gradient w.r.t. the pre-activation.
template <typename T>
Tensor<T> activate_backward(Activation a, const Tensor<T>& pre, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& x, int first);

// Keeps columns [offset, offset + length).
template <typename T>
Tensor<T> crop(const Tensor<T>& x, int offset, int length);

template <typename T>
Tensor<T> crop_backward(const Tensor<T>& grad_out, int full_length, int offset);

// Reverses the time axis.
template <typename T>
Tensor<T> flip_time(const Tensor<T>& x);

template <typename T>
void add_inplace(Tensor<T>& dst, const Tensor<T>& src);

template <typename T>
T dot(const Tensor<T>& a, const Tensor<T>& b);

}  // namespace foley::nn

#endif  // FOLEY_NN_OPS_H_
