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

#include "foley/nn/ops.h"

#include <Eigen/Core>
#include <cmath>
#include <cstring>

#include "foley/errors.h"

namespace foley::nn {
namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<Mat<T>>;
template <typename T>
using CMapMat = Eigen::Map<const Mat<T>>;

void check_geometry(const ConvGeometry& g) {
  if (g.in_channels < 1 || g.out_channels < 1 || g.kernel < 1 || g.stride < 1 || g.padding < 0) {
    throw ShapeError("invalid conv geometry (in=" + std::to_string(g.in_channels) +
                     ", out=" + std::to_string(g.out_channels) +
                     ", kernel=" + std::to_string(g.kernel) +
                     ", stride=" + std::to_string(g.stride) + ")");
  }
}

template <typename T>
void check_conv_params(std::span<const T> weight, std::span<const T> bias, const ConvGeometry& g) {
  const std::size_t expect =
      static_cast<std::size_t>(g.in_channels) * g.out_channels * g.kernel;
  if (weight.size() != expect) {
    throw ShapeError("conv weight has " + std::to_string(weight.size()) + " entries, expected " +
                     std::to_string(expect));
  }
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(g.out_channels)) {
    throw ShapeError("conv bias has " + std::to_string(bias.size()) + " entries, expected " +
                     std::to_string(g.out_channels));
  }
}

// cols[(c*K + k), j] = x[c, j*stride + k - padding], zero outside.
template <typename T>
Mat<T> im2col(const Tensor<T>& x, int kernel, int stride, int padding, int out_len) {
  Mat<T> cols(static_cast<Eigen::Index>(x.channels) * kernel, out_len);
  for (int c = 0; c < x.channels; ++c) {
    const T* src = x.row(c);
    for (int k = 0; k < kernel; ++k) {
      T* dst = cols.data() + (static_cast<std::size_t>(c) * kernel + k) * out_len;
      for (int j = 0; j < out_len; ++j) {
        const int p = j * stride + k - padding;
        dst[j] = (p >= 0 && p < x.length) ? src[p] : T(0);
      }
    }
  }
  return cols;
}

// Adjoint of im2col: scatters-adds columns back into a [channels x length] tensor.
template <typename T>
Tensor<T> col2im(const Mat<T>& cols, int channels, int length, int kernel, int stride,
                 int padding, int out_len) {
  Tensor<T> x(channels, length);
  for (int c = 0; c < channels; ++c) {
    T* dst = x.row(c);
    for (int k = 0; k < kernel; ++k) {
      const T* src = cols.data() + (static_cast<std::size_t>(c) * kernel + k) * out_len;
      for (int j = 0; j < out_len; ++j) {
        const int p = j * stride + k - padding;
        if (p >= 0 && p < length) dst[p] += src[j];
      }
    }
  }
  return x;
}

}  // namespace

int conv1d_output_length(int length, int kernel, int stride, int padding) {
  const int span = length + 2 * padding - kernel;
  if (span < 0) {
    throw ShapeError("kernel " + std::to_string(kernel) + " does not fit padded input of length " +
                     std::to_string(length + 2 * padding));
  }
  return span / stride + 1;
}

int conv1d_transposed_output_length(int length, int kernel, int stride) {
  return (length - 1) * stride + kernel;
}

template <typename T>
Tensor<T> conv1d(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias,
                 const ConvGeometry& g) {
  check_geometry(g);
  if (x.channels != g.in_channels) {
    throw ShapeError("conv1d input " + x.shape_str() + " but layer expects " +
                     std::to_string(g.in_channels) + " channels");
  }
  check_conv_params<T>(weight, bias, g);
  const int out_len = conv1d_output_length(x.length, g.kernel, g.stride, g.padding);
  Tensor<T> y(g.out_channels, out_len);
  MapMat<T> ym(y.data.data(), g.out_channels, out_len);
  CMapMat<T> wm(weight.data(), g.out_channels, static_cast<Eigen::Index>(g.in_channels) * g.kernel);
  if (g.kernel == 1 && g.stride == 1 && g.padding == 0) {
    CMapMat<T> xm(x.data.data(), x.channels, x.length);
    ym.noalias() = wm * xm;
  } else {
    ym.noalias() = wm * im2col(x, g.kernel, g.stride, g.padding, out_len);
  }
  if (!bias.empty()) {
    for (int c = 0; c < g.out_channels; ++c) ym.row(c).array() += bias[c];
  }
  return y;
}

template <typename T>
Tensor<T> conv1d_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                          std::span<const T> weight, std::span<T> grad_weight,
                          std::span<T> grad_bias, const ConvGeometry& g) {
  check_geometry(g);
  const int out_len = conv1d_output_length(x.length, g.kernel, g.stride, g.padding);
  if (grad_out.channels != g.out_channels || grad_out.length != out_len) {
    throw ShapeError("conv1d_backward grad " + grad_out.shape_str() + " vs expected [" +
                     std::to_string(g.out_channels) + " x " + std::to_string(out_len) + "]");
  }
  const Eigen::Index ck = static_cast<Eigen::Index>(g.in_channels) * g.kernel;
  CMapMat<T> gy(grad_out.data.data(), g.out_channels, out_len);
  CMapMat<T> wm(weight.data(), g.out_channels, ck);
  MapMat<T> gw(grad_weight.data(), g.out_channels, ck);
  if (!grad_bias.empty()) {
    for (int c = 0; c < g.out_channels; ++c) grad_bias[c] += gy.row(c).sum();
  }
  if (g.kernel == 1 && g.stride == 1 && g.padding == 0) {
    CMapMat<T> xm(x.data.data(), x.channels, x.length);
    gw.noalias() += gy * xm.transpose();
    Tensor<T> gx(x.channels, x.length);
    MapMat<T>(gx.data.data(), x.channels, x.length).noalias() = wm.transpose() * gy;
    return gx;
  }
  Mat<T> cols = im2col(x, g.kernel, g.stride, g.padding, out_len);
  gw.noalias() += gy * cols.transpose();
  Mat<T> gcols = wm.transpose() * gy;
  return col2im(gcols, x.channels, x.length, g.kernel, g.stride, g.padding, out_len);
}

template <typename T>
Tensor<T> conv1d_transposed(const Tensor<T>& x, std::span<const T> weight,
                            std::span<const T> bias, const ConvGeometry& g) {
  check_geometry(g);
  if (x.channels != g.in_channels) {
    throw ShapeError("conv1d_transposed input " + x.shape_str() + " but layer expects " +
                     std::to_string(g.in_channels) + " channels");
  }
  check_conv_params<T>(weight, bias, g);
  const int out_len = conv1d_transposed_output_length(x.length, g.kernel, g.stride);
  const Eigen::Index ok = static_cast<Eigen::Index>(g.out_channels) * g.kernel;
  CMapMat<T> wm(weight.data(), g.in_channels, ok);
  CMapMat<T> xm(x.data.data(), x.channels, x.length);
  Mat<T> cols = wm.transpose() * xm;
  Tensor<T> y = col2im(cols, g.out_channels, out_len, g.kernel, g.stride, 0, x.length);
  if (!bias.empty()) {
    for (int c = 0; c < g.out_channels; ++c) {
      T* r = y.row(c);
      for (int j = 0; j < out_len; ++j) r[j] += bias[c];
    }
  }
  return y;
}

template <typename T>
Tensor<T> conv1d_transposed_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                                     std::span<const T> weight, std::span<T> grad_weight,
                                     std::span<T> grad_bias, const ConvGeometry& g) {
  check_geometry(g);
  const int out_len = conv1d_transposed_output_length(x.length, g.kernel, g.stride);
  if (grad_out.channels != g.out_channels || grad_out.length != out_len) {
    throw ShapeError("conv1d_transposed_backward grad " + grad_out.shape_str() +
                     " vs expected [" + std::to_string(g.out_channels) + " x " +
                     std::to_string(out_len) + "]");
  }
  const Eigen::Index ok = static_cast<Eigen::Index>(g.out_channels) * g.kernel;
  if (!grad_bias.empty()) {
    for (int c = 0; c < g.out_channels; ++c) {
      const T* r = grad_out.row(c);
      T s = 0;
      for (int j = 0; j < out_len; ++j) s += r[j];
      grad_bias[c] += s;
    }
  }
  Mat<T> gcols = im2col(grad_out, g.kernel, g.stride, 0, x.length);
  CMapMat<T> wm(weight.data(), g.in_channels, ok);
  CMapMat<T> xm(x.data.data(), x.channels, x.length);
  MapMat<T> gw(grad_weight.data(), g.in_channels, ok);
  gw.noalias() += xm * gcols.transpose();
  Tensor<T> gx(x.channels, x.length);
  MapMat<T>(gx.data.data(), x.channels, x.length).noalias() = wm * gcols;
  return gx;
}

template <typename T>
Tensor<T> affine(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias,
                 int out_features) {
  if (weight.size() != static_cast<std::size_t>(out_features) * x.channels) {
    throw ShapeError("affine weight has " + std::to_string(weight.size()) +
                     " entries for input " + x.shape_str() + " and " +
                     std::to_string(out_features) + " outputs");
  }
  Tensor<T> y(out_features, x.length);
  MapMat<T> ym(y.data.data(), out_features, x.length);
  ym.noalias() = CMapMat<T>(weight.data(), out_features, x.channels) *
                 CMapMat<T>(x.data.data(), x.channels, x.length);
  if (!bias.empty()) {
    for (int c = 0; c < out_features; ++c) ym.row(c).array() += bias[c];
  }
  return y;
}

template <typename T>
Tensor<T> affine_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                          std::span<const T> weight, std::span<T> grad_weight,
                          std::span<T> grad_bias) {
  const int out = grad_out.channels;
  if (grad_out.length != x.length || weight.size() != static_cast<std::size_t>(out) * x.channels) {
    throw ShapeError("affine_backward shapes: x " + x.shape_str() + ", grad " +
                     grad_out.shape_str());
  }
  CMapMat<T> gy(grad_out.data.data(), out, x.length);
  CMapMat<T> xm(x.data.data(), x.channels, x.length);
  MapMat<T>(grad_weight.data(), out, x.channels).noalias() += gy * xm.transpose();
  if (!grad_bias.empty()) {
    for (int c = 0; c < out; ++c) grad_bias[c] += gy.row(c).sum();
  }
  Tensor<T> gx(x.channels, x.length);
  MapMat<T>(gx.data.data(), x.channels, x.length).noalias() =
      CMapMat<T>(weight.data(), out, x.channels).transpose() * gy;
  return gx;
}

template <typename T>
Tensor<T> activate(Activation a, const Tensor<T>& pre) {
  Tensor<T> y(pre.channels, pre.length);
  const std::size_t n = pre.size();
  const T* p = pre.data.data();
  T* o = y.data.data();
  switch (a) {
    case Activation::kIdentity:
      std::memcpy(o, p, n * sizeof(T));
      break;
    case Activation::kSilu:
      for (std::size_t i = 0; i < n; ++i) o[i] = p[i] / (T(1) + std::exp(-p[i]));
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < n; ++i) o[i] = std::tanh(p[i]);
      break;
  }
  return y;
}

template <typename T>
Tensor<T> activate_backward(Activation a, const Tensor<T>& pre, const Tensor<T>& grad_out) {
  if (!pre.same_shape(grad_out)) {
    throw ShapeError("activation backward " + pre.shape_str() + " vs " + grad_out.shape_str());
  }
  Tensor<T> g(pre.channels, pre.length);
  const std::size_t n = pre.size();
  const T* p = pre.data.data();
  const T* go = grad_out.data.data();
  T* o = g.data.data();
  switch (a) {
    case Activation::kIdentity:
      std::memcpy(o, go, n * sizeof(T));
      break;
    case Activation::kSilu:
      for (std::size_t i = 0; i < n; ++i) {
        const T s = T(1) / (T(1) + std::exp(-p[i]));
        o[i] = go[i] * s * (T(1) + p[i] * (T(1) - s));
      }
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < n; ++i) {
        const T t = std::tanh(p[i]);
        o[i] = go[i] * (T(1) - t * t);
      }
      break;
  }
  return g;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.length != b.length) {
    throw ShapeError("concat_channels length mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
  Tensor<T> y(a.channels + b.channels, a.length);
  std::copy(a.data.begin(), a.data.end(), y.data.begin());
  std::copy(b.data.begin(), b.data.end(), y.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return y;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& x, int first) {
  if (first < 0 || first > x.channels) throw ShapeError("split point outside " + x.shape_str());
  Tensor<T> a(first, x.length), b(x.channels - first, x.length);
  auto mid = x.data.begin() + static_cast<std::ptrdiff_t>(a.size());
  std::copy(x.data.begin(), mid, a.data.begin());
  std::copy(mid, x.data.end(), b.data.begin());
  return {std::move(a), std::move(b)};
}

template <typename T>
Tensor<T> crop(const Tensor<T>& x, int offset, int length) {
  if (offset < 0 || length < 0 || offset + length > x.length) {
    throw ShapeError("crop [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                     ") outside " + x.shape_str());
  }
  Tensor<T> y(x.channels, length);
  for (int c = 0; c < x.channels; ++c) std::copy_n(x.row(c) + offset, length, y.row(c));
  return y;
}

template <typename T>
Tensor<T> crop_backward(const Tensor<T>& grad_out, int full_length, int offset) {
  Tensor<T> g(grad_out.channels, full_length);
  for (int c = 0; c < grad_out.channels; ++c) {
    std::copy_n(grad_out.row(c), grad_out.length, g.row(c) + offset);
  }
  return g;
}

template <typename T>
Tensor<T> flip_time(const Tensor<T>& x) {
  Tensor<T> y(x.channels, x.length);
  for (int c = 0; c < x.channels; ++c) {
    const T* s = x.row(c);
    T* d = y.row(c);
    for (int l = 0; l < x.length; ++l) d[l] = s[x.length - 1 - l];
  }
  return y;
}

template <typename T>
void add_inplace(Tensor<T>& dst, const Tensor<T>& src) {
  if (!dst.same_shape(src)) {
    throw ShapeError("add shape mismatch " + dst.shape_str() + " vs " + src.shape_str());
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
}

template <typename T>
T dot(const Tensor<T>& a, const Tensor<T>& b) {
  if (!a.same_shape(b)) throw ShapeError("dot shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

#define FOLEY_INSTANTIATE_OPS(T)                                                               \
  template Tensor<T> conv1d(const Tensor<T>&, std::span<const T>, std::span<const T>,          \
                            const ConvGeometry&);                                              \
  template Tensor<T> conv1d_backward(const Tensor<T>&, const Tensor<T>&, std::span<const T>,   \
                                     std::span<T>, std::span<T>, const ConvGeometry&);         \
  template Tensor<T> conv1d_transposed(const Tensor<T>&, std::span<const T>,                   \
                                       std::span<const T>, const ConvGeometry&);               \
  template Tensor<T> conv1d_transposed_backward(const Tensor<T>&, const Tensor<T>&,            \
                                                std::span<const T>, std::span<T>,              \
                                                std::span<T>, const ConvGeometry&);            \
  template Tensor<T> affine(const Tensor<T>&, std::span<const T>, std::span<const T>, int);    \
  template Tensor<T> affine_backward(const Tensor<T>&, const Tensor<T>&, std::span<const T>,   \
                                     std::span<T>, std::span<T>);                              \
  template Tensor<T> activate(Activation, const Tensor<T>&);                                   \
  template Tensor<T> activate_backward(Activation, const Tensor<T>&, const Tensor<T>&);        \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);                      \
  template std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>&, int);              \
  template Tensor<T> crop(const Tensor<T>&, int, int);                                         \
  template Tensor<T> crop_backward(const Tensor<T>&, int, int);                                \
  template Tensor<T> flip_time(const Tensor<T>&);                                              \
  template void add_inplace(Tensor<T>&, const Tensor<T>&);                                     \
  template T dot(const Tensor<T>&, const Tensor<T>&);

FOLEY_INSTANTIATE_OPS(float)
FOLEY_INSTANTIATE_OPS(double)

}  // namespace foley::nn
