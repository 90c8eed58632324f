// dsr/layers.h

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

#ifndef DSR_LAYERS_H_
#define DSR_LAYERS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "dsr/common.h"
#include "dsr/matrix.h"

namespace dsr {

// A named view over one parameter buffer and its gradient buffer. Models
// hand these out in a stable order; optimizers key their state on that order.
struct ParamView {
  std::string name;
  double* value;
  double* grad;
  std::size_t size;
};

using ParamSet = std::vector<ParamView>;

enum class Activation {
  kLinear,
  kSigmoid,
  kTanh,
  kRelu,
  kSoftmax,
  kLogSoftmax,
};

Matrix ActivationForward(Activation act, const Matrix& z);
// dy is the gradient at the activation output; y the cached output.
Matrix ActivationBackward(Activation act, const Matrix& y, const Matrix& dy);

// Affine transform y = g(x W^T + b) with cached forward state.
class Dense {
 public:
  Dense(std::size_t in_dim, std::size_t out_dim,
        Activation act = Activation::kLinear);

  Matrix Forward(const Matrix& x);
  // Returns dx and accumulates parameter gradients.
  Matrix Backward(const Matrix& dy);

  void ZeroGrad();
  void CollectParams(const std::string& prefix, ParamSet* out);

  std::size_t in_dim() const { return w_.cols(); }
  std::size_t out_dim() const { return w_.rows(); }
  Activation activation() const { return act_; }

  Matrix& weights() { return w_; }
  const Matrix& weights() const { return w_; }
  std::vector<double>& bias() { return b_; }
  const std::vector<double>& bias() const { return b_; }

 private:
  Matrix w_;  // out x in
  std::vector<double> b_;
  Activation act_;
  Matrix gw_;
  std::vector<double> gb_;
  Matrix x_, y_;
};

// Per-feature batch normalization with trainable scale/shift. Defaults
// follow the small-variance initialization gamma = 0.1, beta = 0.01.
class BatchNorm {
 public:
  explicit BatchNorm(std::size_t dim, double eps = 1e-5,
                     double momentum = 0.9);

  // Train mode normalizes with batch statistics (batch >= 2) and updates the
  // running estimates; inference mode applies the running affine map.
  Matrix Forward(const Matrix& x, bool train);
  Matrix Backward(const Matrix& dy);

  void ZeroGrad();
  void CollectParams(const std::string& prefix, ParamSet* out);

  std::size_t dim() const { return gamma_.size(); }
  std::vector<double>& gamma() { return gamma_; }
  std::vector<double>& beta() { return beta_; }
  std::vector<double>& running_mean() { return running_mean_; }
  std::vector<double>& running_var() { return running_var_; }

 private:
  std::vector<double> gamma_, beta_;
  std::vector<double> running_mean_, running_var_;
  std::vector<double> ggamma_, gbeta_;
  double eps_;
  double momentum_;
  // forward cache
  bool train_mode_ = false;
  Matrix xhat_;
  std::vector<double> inv_std_;
};

// Inverted dropout: train-time scaling by 1/(1-rate) keeps inference pure.
class Dropout {
 public:
  explicit Dropout(double rate);

  Matrix Forward(const Matrix& x, bool train, Rng* rng);
  // Applies a caller-provided mask (already scaled); used by the recurrent
  // layers to share one mask across all time steps of a sequence.
  Matrix ForwardWithMask(const Matrix& x, const Matrix& mask);
  Matrix Backward(const Matrix& dy);

  double rate() const { return rate_; }
  // Samples a scaled keep-mask of the given shape.
  Matrix SampleMask(std::size_t rows, std::size_t cols, Rng* rng) const;

 private:
  double rate_;
  bool identity_ = true;
  Matrix mask_;
};

struct LossGrad {
  double value = 0.0;
  Matrix grad;
};

// Mean squared error over all elements.
LossGrad MseLoss(const Matrix& pred, const Matrix& target);

// Negative log-likelihood of the correct class; `log_probs` rows are
// log-softmax outputs.
LossGrad NllLoss(const Matrix& log_probs, const std::vector<int>& labels);

// Fraction of rows whose argmax matches the label.
double FrameAccuracy(const Matrix& scores, const std::vector<int>& labels);

}  // namespace dsr

#endif  // DSR_LAYERS_H_
