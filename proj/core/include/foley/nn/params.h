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

#ifndef FOLEY_NN_PARAMS_H_
#define FOLEY_NN_PARAMS_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "foley/nn/tensor.h"

namespace foley::nn {

template <typename T>
struct Param {
  std::string name;
  std::vector<int> shape;
  Buffer<T> value;
  Buffer<T> grad;

  std::size_t size() const { return value.size(); }
  std::span<const T> cvalue() const { return value; }
};

// Owns every trainable array of a model. Parameters keep stable addresses,
// so layers hold raw pointers into the store.
template <typename T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  // Registers a zero-valued parameter. Names must be unique.
  Param<T>& add(const std::string& name, std::vector<int> shape);

  Param<T>* find(const std::string& name);
  const Param<T>* find(const std::string& name) const;
  Param<T>& at(const std::string& name);

  std::vector<Param<T>*> params();
  std::vector<const Param<T>*> params() const;

  void zero_grad();
  std::size_t count() const;

  // Flattens every value (or gradient) in registration order.
  std::vector<T> flat_values() const;
  std::vector<T> flat_grads() const;

  // Copies values (not gradients) from a store with identical layout.
  template <typename U>
  void copy_values_from(const ParamStore<U>& other);

 private:
  std::vector<std::unique_ptr<Param<T>>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace foley::nn

#endif  // FOLEY_NN_PARAMS_H_
