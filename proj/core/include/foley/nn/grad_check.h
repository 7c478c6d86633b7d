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

#ifndef FOLEY_NN_GRAD_CHECK_H_
#define FOLEY_NN_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <string>

#include "foley/nn/params.h"

namespace foley::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// `loss(accumulate)` returns the scalar objective for the current parameter
// values; when `accumulate` is true it must also add the analytic gradient
// into every parameter's grad buffer. Each checked entry compares the
// analytic derivative with a central difference of step `eps`:
//   |analytic - numeric| / max(1, |numeric|)
// `max_per_param` (0 = all) caps how many entries of each parameter are
// probed; the probed indices are spread evenly across the array.
GradCheckResult grad_check(const std::function<double(bool accumulate)>& loss,
                           ParamStore<double>& params, double eps = 1e-5,
                           std::size_t max_per_param = 0);

}  // namespace foley::nn

#endif  // FOLEY_NN_GRAD_CHECK_H_
