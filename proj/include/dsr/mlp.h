// dsr/mlp.h

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

#ifndef DSR_MLP_H_
#define DSR_MLP_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dsr/layers.h"
#include "dsr/optim.h"

namespace dsr {

// Hidden stack: per layer Dense (linear) -> optional BatchNorm -> activation
// -> optional dropout.
class MlpTrunk {
 public:
  MlpTrunk() = default;
  MlpTrunk(std::size_t in_dim, const std::vector<std::size_t>& hidden,
           Activation act, bool batchnorm, double dropout, Rng* rng);

  Matrix Forward(const Matrix& x, bool train, Rng* rng);
  Matrix Backward(const Matrix& dy);
  void ZeroGrad();
  void CollectParams(const std::string& prefix, ParamSet* out);

  std::size_t out_dim() const { return out_dim_; }
  std::size_t n_layers() const { return dense_.size(); }
  Dense& dense(std::size_t i) { return dense_[i]; }

 private:
  std::vector<Dense> dense_;
  std::vector<BatchNorm> bn_;
  std::vector<Dropout> drop_;
  std::vector<Matrix> act_out_;
  Activation act_ = Activation::kRelu;
  bool batchnorm_ = false;
  bool has_dropout_ = false;
  std::size_t out_dim_ = 0;
};

struct MlpConfig {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<std::size_t> hidden;
  Activation hidden_act = Activation::kRelu;
  Activation output_act = Activation::kLinear;
  bool batchnorm = false;
  double dropout = 0.0;
  double relu_bias = 0.0;  // set to 0.1 to give ReLU layers a positive bias
};

class Mlp {
 public:
  Mlp() = default;
  Mlp(const MlpConfig& config, Rng* rng);

  Matrix Forward(const Matrix& x, bool train, Rng* rng);
  Matrix Backward(const Matrix& dy);
  void ZeroGrad();
  void CollectParams(const std::string& prefix, ParamSet* out);
  ParamSet Params();

  const MlpConfig& config() const { return config_; }
  MlpTrunk& trunk() { return trunk_; }
  Dense& head() { return head_; }

 private:
  MlpConfig config_;
  MlpTrunk trunk_;
  Dense head_{1, 1};
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_metric = 0.0;  // frame accuracy, or -dev_loss for regression
  double lr = 0.0;
  bool halved = false;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  bool stopped_by_schedule = false;
};

struct TrainConfig {
  OptimizerConfig optimizer;
  LrSchedule schedule;
  std::size_t batch_size = 128;
  int max_epochs = 50;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

// Minibatch training with the dev-driven halving schedule. Deterministic in
// config.seed. The dataset rows are samples.
TrainResult TrainClassifier(Mlp* model, const Matrix& x,
                            const std::vector<int>& labels,
                            const Matrix& dev_x,
                            const std::vector<int>& dev_labels,
                            const TrainConfig& config);

TrainResult TrainRegressor(Mlp* model, const Matrix& x, const Matrix& targets,
                           const Matrix& dev_x, const Matrix& dev_targets,
                           const TrainConfig& config);

// Supervised warm start: copy the already-trained model and resume training
// on the new data with the initial learning rate scaled by lr_factor.
struct WarmStartResult {
  Mlp model;
  TrainResult log;
};

WarmStartResult WarmStartFinetuneClassifier(
    const Mlp& pretrained, const Matrix& x, const std::vector<int>& labels,
    const Matrix& dev_x, const std::vector<int>& dev_labels, double lr_factor,
    const TrainConfig& config);

}  // namespace dsr

#endif  // DSR_MLP_H_
