// src/gradcheck.cc

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

#include "dsr/gradcheck.h"

#include <cmath>
#include <vector>

namespace dsr {

GradCheckReport GradCheck(const ParamSet& params,
                          const std::function<double()>& loss_only,
                          const std::function<double()>& loss_and_grad,
                          double eps_fd) {
  loss_and_grad();
  std::vector<std::vector<double>> analytic(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    analytic[p].assign(params[p].grad, params[p].grad + params[p].size);
  }

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& view = params[p];
    for (std::size_t i = 0; i < view.size; ++i) {
      const double saved = view.value[i];
      view.value[i] = saved + eps_fd;
      const double plus = loss_only();
      view.value[i] = saved - eps_fd;
      const double minus = loss_only();
      view.value[i] = saved;

      const double numeric = (plus - minus) / (2.0 * eps_fd);
      const double ga = analytic[p][i];
      const double denom =
          std::max({std::abs(ga), std::abs(numeric), 1e-12});
      const double rel = std::abs(ga - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = view.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

GradCheckReport GradCheck4(const ParamSet& params,
                           const std::function<double()>& loss_only,
                           const std::function<double()>& loss_and_grad,
                           double eps_fd) {
  loss_and_grad();
  std::vector<std::vector<double>> analytic(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    analytic[p].assign(params[p].grad, params[p].grad + params[p].size);
  }

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& view = params[p];
    for (std::size_t i = 0; i < view.size; ++i) {
      const double saved = view.value[i];
      auto eval_at = [&](double offset) {
        view.value[i] = saved + offset;
        const double loss = loss_only();
        view.value[i] = saved;
        return loss;
      };
      const double numeric =
          (8.0 * (eval_at(eps_fd) - eval_at(-eps_fd)) -
           (eval_at(2.0 * eps_fd) - eval_at(-2.0 * eps_fd))) /
          (12.0 * eps_fd);
      const double ga = analytic[p][i];
      const double denom =
          std::max({std::abs(ga), std::abs(numeric), 1e-12});
      const double rel = std::abs(ga - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = view.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace dsr
