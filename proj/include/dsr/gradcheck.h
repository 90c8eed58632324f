// dsr/gradcheck.h

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

#ifndef DSR_GRADCHECK_H_
#define DSR_GRADCHECK_H_

#include <functional>
#include <string>

#include "dsr/layers.h"

namespace dsr {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t checked = 0;
};

// Central finite differences per parameter scalar:
//   rel = |g_analytic - g_numeric| / max(|g_analytic|, |g_numeric|, 1e-12)
// loss_and_grad must zero the model gradients, run forward+backward, and
// return the loss; loss_only must be a pure evaluation of the same loss.
GradCheckReport GradCheck(const ParamSet& params,
                          const std::function<double()>& loss_only,
                          const std::function<double()>& loss_and_grad,
                          double eps_fd = 1e-5);

// Fourth-order central stencil (8(L(+e)-L(-e)) - (L(+2e)-L(-2e))) / 12e.
// The larger step keeps the floating-point subtraction noise far below the
// strictest thresholds, which matters for the near-zero reset-gate gradients
// of the recurrent cells.
GradCheckReport GradCheck4(const ParamSet& params,
                           const std::function<double()>& loss_only,
                           const std::function<double()>& loss_and_grad,
                           double eps_fd = 1e-3);

}  // namespace dsr

#endif  // DSR_GRADCHECK_H_
