// src/optim.cc

// Copyright 2026  dsrlab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dsr/optim.h"

#include <cmath>

namespace dsr {

void Optimizer::Step(const ParamSet& params) {
  if (m_.size() < params.size()) m_.resize(params.size());
  if (config_.kind == OptimizerKind::kAdam && v_.size() < params.size()) {
    v_.resize(params.size());
  }

  if (config_.kind == OptimizerKind::kSgd) {
    for (std::size_t p = 0; p < params.size(); ++p) {
      const auto& view = params[p];
      if (config_.momentum == 0.0) {
        for (std::size_t i = 0; i < view.size; ++i) {
          view.value[i] -= config_.lr * view.grad[i];
        }
      } else {
        auto& vel = m_[p];
        if (vel.size() != view.size) vel.assign(view.size, 0.0);
        for (std::size_t i = 0; i < view.size; ++i) {
          vel[i] = config_.momentum * vel[i] + view.grad[i];
          view.value[i] -= config_.lr * vel[i];
        }
      }
    }
    return;
  }

  // Adam with bias correction
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, t_);
  const double bc2 = 1.0 - std::pow(config_.beta2, t_);
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& view = params[p];
    auto& m = m_[p];
    auto& v = v_[p];
    if (m.size() != view.size) m.assign(view.size, 0.0);
    if (v.size() != view.size) v.assign(view.size, 0.0);
    for (std::size_t i = 0; i < view.size; ++i) {
      const double g = view.grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      view.value[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

}  // namespace dsr
