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

#include "foley/nn/grad_check.h"

#include <algorithm>
#include <cmath>

#include "foley/errors.h"

namespace foley::nn {

GradCheckResult grad_check(const std::function<double(bool accumulate)>& loss,
                           ParamStore<double>& params, double eps, std::size_t max_per_param) {
  if (!(eps > 0.0)) throw DomainError("grad_check step must be positive");
  params.zero_grad();
  const double base = loss(true);
  if (!std::isfinite(base)) throw NumericError("grad_check: loss is not finite");

  GradCheckResult result;
  for (Param<double>* p : params.params()) {
    const std::size_t n = p->size();
    if (n == 0) continue;
    const std::size_t probes = max_per_param == 0 ? n : std::min(n, max_per_param);
    for (std::size_t k = 0; k < probes; ++k) {
      const std::size_t i = probes == n ? k : (k * n) / probes + (n / probes) / 2;
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double up = loss(false);
      p->value[i] = saved - eps;
      const double down = loss(false);
      p->value[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(p->grad[i])) {
        throw NumericError("grad_check: non-finite value at " + p->name + "[" +
                           std::to_string(i) + "]");
      }
      const double numeric = (up - down) / (2.0 * eps);
      const double err = std::abs(p->grad[i] - numeric) / std::max(1.0, std::abs(numeric));
      ++result.checked;
      if (result.checked == 1 || err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = p->name;
        result.worst_index = i;
        result.worst_analytic = p->grad[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace foley::nn
