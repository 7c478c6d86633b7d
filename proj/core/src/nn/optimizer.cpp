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

#include "foley/nn/optimizer.h"

#include <cmath>

#include "foley/errors.h"

namespace foley::nn {

template <typename T>
Adam<T>::Adam(ParamStore<T>& store, AdamConfig cfg) : store_(store), cfg_(cfg) {
  for (const Param<T>* p : store_.params()) {
    m_.emplace_back(p->size(), T(0));
    v_.emplace_back(p->size(), T(0));
  }
}

template <typename T>
double Adam<T>::step(double grad_scale) {
  auto params = store_.params();
  double sq = 0.0;
  for (const Param<T>* p : params) {
    for (T g : p->grad) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq) * std::abs(grad_scale);
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  double scale = grad_scale;
  if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) scale *= cfg_.clip_norm / norm;

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const T b1 = static_cast<T>(cfg_.beta1);
  const T b2 = static_cast<T>(cfg_.beta2);
  const T step_size = static_cast<T>(cfg_.lr / bc1);
  const T inv_bc2 = static_cast<T>(1.0 / bc2);
  const T eps = static_cast<T>(cfg_.eps);
  const T s = static_cast<T>(scale);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param<T>& p = *params[k];
    std::vector<T>& m = m_[k];
    std::vector<T>& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const T g = p.grad[i] * s;
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      p.value[i] -= step_size * m[i] / (std::sqrt(v[i] * inv_bc2) + eps);
    }
  }
  return norm;
}

template <typename T>
std::vector<NamedArray> Adam<T>::state() const {
  std::vector<NamedArray> out;
  auto params = store_.params();
  for (std::size_t k = 0; k < params.size(); ++k) {
    out.push_back({"adam.m/" + params[k]->name, params[k]->shape,
                   std::vector<float>(m_[k].begin(), m_[k].end())});
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    out.push_back({"adam.v/" + params[k]->name, params[k]->shape,
                   std::vector<float>(v_[k].begin(), v_[k].end())});
  }
  return out;
}

template <typename T>
void Adam<T>::load_state(const std::vector<NamedArray>& arrays, std::uint64_t steps) {
  auto params = store_.params();
  auto assign = [&](const std::string& prefix, std::vector<std::vector<T>>& dst) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      const std::string want = prefix + params[k]->name;
      const NamedArray* found = nullptr;
      for (const NamedArray& a : arrays) {
        if (a.name == want) found = &a;
      }
      if (!found || found->data.size() != params[k]->size()) {
        throw FormatError("optimizer state missing or mis-sized: " + want);
      }
      dst[k].assign(found->data.begin(), found->data.end());
    }
  };
  assign("adam.m/", m_);
  assign("adam.v/", v_);
  t_ = steps;
}

template class Adam<float>;
template class Adam<double>;

}  // namespace foley::nn
