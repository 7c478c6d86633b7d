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

#include "foley/nn/params.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include "foley/errors.h"

namespace foley::nn {

template <typename T>
Param<T>& ParamStore<T>::add(const std::string& name, std::vector<int> shape) {
  if (index_.count(name)) throw ShapeError("duplicate parameter name: " + name);
  auto p = std::make_unique<Param<T>>();
  p->name = name;
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension in parameter " + name);
    n *= static_cast<std::size_t>(d);
  }
  p->shape = std::move(shape);
  p->value.assign(n, T(0));
  p->grad.assign(n, T(0));
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

template <typename T>
Param<T>* ParamStore<T>::find(const std::string& name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

template <typename T>
const Param<T>* ParamStore<T>::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

template <typename T>
Param<T>& ParamStore<T>::at(const std::string& name) {
  Param<T>* p = find(name);
  if (!p) throw ShapeError("no parameter named " + name);
  return *p;
}

template <typename T>
std::vector<Param<T>*> ParamStore<T>::params() {
  std::vector<Param<T>*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

template <typename T>
std::vector<const Param<T>*> ParamStore<T>::params() const {
  std::vector<const Param<T>*> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), T(0));
}

template <typename T>
std::size_t ParamStore<T>::count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

template <typename T>
std::vector<T> ParamStore<T>::flat_values() const {
  std::vector<T> out;
  out.reserve(count());
  for (const auto& p : params_) out.insert(out.end(), p->value.begin(), p->value.end());
  return out;
}

template <typename T>
std::vector<T> ParamStore<T>::flat_grads() const {
  std::vector<T> out;
  out.reserve(count());
  for (const auto& p : params_) out.insert(out.end(), p->grad.begin(), p->grad.end());
  return out;
}

template <typename T>
template <typename U>
void ParamStore<T>::copy_values_from(const ParamStore<U>& other) {
  auto src = other.params();
  if (src.size() != params_.size()) throw ShapeError("parameter stores differ in layout");
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i]->name != params_[i]->name || src[i]->shape != params_[i]->shape) {
      throw ShapeError("parameter mismatch at " + params_[i]->name);
    }
    std::transform(src[i]->value.begin(), src[i]->value.end(), params_[i]->value.begin(),
                   [](U v) { return static_cast<T>(v); });
  }
}

template class ParamStore<float>;
template class ParamStore<double>;
template void ParamStore<float>::copy_values_from(const ParamStore<float>&);
template void ParamStore<float>::copy_values_from(const ParamStore<double>&);
template void ParamStore<double>::copy_values_from(const ParamStore<float>&);
template void ParamStore<double>::copy_values_from(const ParamStore<double>&);

}  // namespace foley::nn
