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

#ifndef FOLEY_NN_TENSOR_H_
#define FOLEY_NN_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <new>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace foley::nn {

// 64-byte aligned storage. Vectorized kernels pick scalar or packet paths
// from the buffer address, and those paths round differently; fixing the
// alignment makes results a function of shape alone.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

// Dense [channels x length] activation, row-major (one row per channel).
template <typename T>
struct Tensor {
  int channels = 0;
  int length = 0;
  Buffer<T> data;

  Tensor() = default;
  Tensor(int c, int l, T fill = T(0))
      : channels(c), length(l), data(static_cast<std::size_t>(c) * l, fill) {}

  T& operator()(int c, int l) { return data[static_cast<std::size_t>(c) * length + l]; }
  const T& operator()(int c, int l) const {
    return data[static_cast<std::size_t>(c) * length + l];
  }
  T* row(int c) { return data.data() + static_cast<std::size_t>(c) * length; }
  const T* row(int c) const { return data.data() + static_cast<std::size_t>(c) * length; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return channels == o.channels && length == o.length; }
  std::string shape_str() const {
    return "[" + std::to_string(channels) + " x " + std::to_string(length) + "]";
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(channels, length);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

// Seedable stream of uniform and Gaussian draws. The Gaussian path does not
// cache a second deviate, so the whole state is the engine state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, n).
  int uniform_int(int n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

  template <typename T>
  void fill_normal(std::span<T> out) {
    for (T& v : out) v = static_cast<T>(normal());
  }

  // Derives an independent child stream; used to give each clip or item its
  // own reproducible source.
  Rng split() { return Rng(engine_() ^ 0x9E3779B97F4A7C15ull); }

  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

}  // namespace foley::nn

#endif  // FOLEY_NN_TENSOR_H_
