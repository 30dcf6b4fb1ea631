/*
 * Copyright (C) 2026 The tcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Central finite-difference checker shared by the unit and acceptance tests.

#pragma once

#include <tcast/autodiff.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace tcast::testing {

struct GradCheck {
  double worst_rel = 0.0;
  std::size_t checked = 0;
};

/// `loss` builds a scalar from parameter handles on the given tape.
using LossFn = std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>;

inline double eval_loss(const LossFn& loss, const std::vector<ad::Tensor>& params) {
  ad::Tape tape;
  std::vector<ad::Var> v;
  for (const auto& p : params) v.push_back(tape.constant(p));
  return loss(tape, v).value().item();
}

/// Relative error |a - n| / max(|a|, |n|, floor) over every scalar parameter.
inline GradCheck check_gradients(const LossFn& loss, std::vector<ad::Tensor> params, double eps = 1e-5,
                                 double floor = 1e-7) {
  ad::Tape tape;
  std::vector<ad::Var> v;
  for (const auto& p : params) v.push_back(tape.parameter(p));
  auto grads = tape.backward(loss(tape, v));
  GradCheck out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& g = grads.at(v[k].id);
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      const double x = params[k][i];
      params[k][i] = x + eps;
      const double fp = eval_loss(loss, params);
      params[k][i] = x - eps;
      const double fm = eval_loss(loss, params);
      params[k][i] = x;
      const double num = (fp - fm) / (2.0 * eps);
      const double rel = std::abs(g[i] - num) / std::max({std::abs(g[i]), std::abs(num), floor});
      out.worst_rel = std::max(out.worst_rel, rel);
      ++out.checked;
    }
  }
  return out;
}

}  // namespace tcast::testing
