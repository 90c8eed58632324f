// dsr/optim.h

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

#ifndef DSR_OPTIM_H_
#define DSR_OPTIM_H_

#include <cstddef>
#include <vector>

#include "dsr/layers.h"

namespace dsr {

enum class OptimizerKind {
  kSgd,
  kAdam,
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double lr = 0.08;
  double momentum = 0.0;  // SGD only; the paper leaves the coefficient open
  double beta1 = 0.9;     // Adam
  double beta2 = 0.999;
  double eps = 1e-8;
};

// theta <- theta - lr * grad, with optional classical momentum. Optimizer
// state is keyed on the order of the ParamSet, which must stay stable
// across steps.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& config) : config_(config) {}

  void Step(const ParamSet& params);

  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  void HalveLr() { config_.lr /= 2.0; }
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;  // Adam moments / SGD velocity
};

// Dev-metric driven learning-rate policy: the rate is kept while the
// improvement exceeds the start threshold, then halved every epoch until the
// improvement drops below the stop threshold. Metrics are "higher is
// better" fractions (frame accuracy, or a negated loss).
struct LrSchedule {
  double improve_threshold = 0.005;  // 0.5 percent
  double stop_threshold = 0.001;     // 0.1 percent

  enum class Action { kKeep, kHalve, kStop };

  Action Update(double dev_metric) {
    if (!has_prev_) {
      has_prev_ = true;
      prev_ = dev_metric;
      return Action::kKeep;
    }
    const double improvement = dev_metric - prev_;
    prev_ = dev_metric;
    if (!halving_) {
      if (improvement > improve_threshold) return Action::kKeep;
      halving_ = true;
      return Action::kHalve;
    }
    if (improvement < stop_threshold) return Action::kStop;
    return Action::kHalve;
  }

 private:
  bool has_prev_ = false;
  bool halving_ = false;
  double prev_ = 0.0;
};

}  // namespace dsr

#endif  // DSR_OPTIM_H_
