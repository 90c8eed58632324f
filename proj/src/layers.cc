// src/layers.cc

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

#include "dsr/layers.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace dsr {

Matrix ActivationForward(Activation act, const Matrix& z) {
  Matrix y = z;
  switch (act) {
    case Activation::kLinear:
      break;
    case Activation::kSigmoid:
      for (double& v : y.values()) v = 1.0 / (1.0 + std::exp(-v));
      break;
    case Activation::kTanh:
      for (double& v : y.values()) v = std::tanh(v);
      break;
    case Activation::kRelu:
      for (double& v : y.values()) v = std::max(0.0, v);
      break;
    case Activation::kSoftmax:
    case Activation::kLogSoftmax:
      for (std::size_t i = 0; i < y.rows(); ++i) {
        double mx = y(i, 0);
        for (std::size_t j = 1; j < y.cols(); ++j) mx = std::max(mx, y(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < y.cols(); ++j) {
          sum += std::exp(y(i, j) - mx);
        }
        const double log_sum = mx + std::log(sum);
        for (std::size_t j = 0; j < y.cols(); ++j) {
          const double lp = y(i, j) - log_sum;
          y(i, j) = act == Activation::kSoftmax ? std::exp(lp) : lp;
        }
      }
      break;
  }
  return y;
}

Matrix ActivationBackward(Activation act, const Matrix& y, const Matrix& dy) {
  Matrix dz = dy;
  switch (act) {
    case Activation::kLinear:
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < dz.size(); ++i) {
        const double v = y.values()[i];
        dz.values()[i] *= v * (1.0 - v);
      }
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < dz.size(); ++i) {
        const double v = y.values()[i];
        dz.values()[i] *= 1.0 - v * v;
      }
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < dz.size(); ++i) {
        if (y.values()[i] <= 0.0) dz.values()[i] = 0.0;
      }
      break;
    case Activation::kSoftmax:
      for (std::size_t i = 0; i < y.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < y.cols(); ++j) dot += dy(i, j) * y(i, j);
        for (std::size_t j = 0; j < y.cols(); ++j) {
          dz(i, j) = y(i, j) * (dy(i, j) - dot);
        }
      }
      break;
    case Activation::kLogSoftmax:
      for (std::size_t i = 0; i < y.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < y.cols(); ++j) sum += dy(i, j);
        for (std::size_t j = 0; j < y.cols(); ++j) {
          dz(i, j) = dy(i, j) - std::exp(y(i, j)) * sum;
        }
      }
      break;
  }
  return dz;
}

Dense::Dense(std::size_t in_dim, std::size_t out_dim, Activation act)
    : w_(out_dim, in_dim),
      b_(out_dim, 0.0),
      act_(act),
      gw_(out_dim, in_dim),
      gb_(out_dim, 0.0) {}

Matrix Dense::Forward(const Matrix& x) {
  if (x.cols() != w_.cols()) {
    throw ArgumentError("Dense::Forward: input dim mismatch");
  }
  x_ = x;
  y_ = ActivationForward(act_, AffineForward(x, w_, b_));
  return y_;
}

Matrix Dense::Backward(const Matrix& dy) {
  if (dy.rows() != y_.rows() || dy.cols() != y_.cols()) {
    throw ArgumentError("Dense::Backward: gradient shape mismatch");
  }
  const Matrix dz = ActivationBackward(act_, y_, dy);
  gw_ += MatMulTN(dz, x_);
  const auto col = ColumnSums(dz);
  for (std::size_t j = 0; j < gb_.size(); ++j) gb_[j] += col[j];
  return MatMul(dz, w_);
}

void Dense::ZeroGrad() {
  gw_.setZero();
  std::fill(gb_.begin(), gb_.end(), 0.0);
}

void Dense::CollectParams(const std::string& prefix, ParamSet* out) {
  out->push_back({prefix + ".W", w_.data(), gw_.data(), w_.size()});
  out->push_back({prefix + ".b", b_.data(), gb_.data(), b_.size()});
}

BatchNorm::BatchNorm(std::size_t dim, double eps, double momentum)
    : gamma_(dim, 0.1),
      beta_(dim, 0.01),
      running_mean_(dim, 0.0),
      running_var_(dim, 1.0),
      ggamma_(dim, 0.0),
      gbeta_(dim, 0.0),
      eps_(eps),
      momentum_(momentum) {
  if (eps <= 0.0) throw ArgumentError("BatchNorm: eps must be positive");
}

Matrix BatchNorm::Forward(const Matrix& x, bool train) {
  if (x.cols() != dim()) throw ArgumentError("BatchNorm: dim mismatch");
  train_mode_ = train;
  const std::size_t n = x.rows();
  const std::size_t d = dim();
  Matrix y(n, d);
  xhat_ = Matrix(n, d);
  inv_std_.assign(d, 0.0);

  if (train) {
    if (n < 2) {
      throw ArgumentError("BatchNorm: train mode needs batch size >= 2");
    }
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = x(i, j) - mean;
        var += c * c;
      }
      var /= static_cast<double>(n);
      const double istd = 1.0 / std::sqrt(var + eps_);
      inv_std_[j] = istd;
      for (std::size_t i = 0; i < n; ++i) {
        xhat_(i, j) = (x(i, j) - mean) * istd;
        y(i, j) = gamma_[j] * xhat_(i, j) + beta_[j];
      }
      running_mean_[j] = momentum_ * running_mean_[j] + (1.0 - momentum_) * mean;
      running_var_[j] = momentum_ * running_var_[j] + (1.0 - momentum_) * var;
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      const double istd = 1.0 / std::sqrt(running_var_[j] + eps_);
      inv_std_[j] = istd;
      for (std::size_t i = 0; i < n; ++i) {
        xhat_(i, j) = (x(i, j) - running_mean_[j]) * istd;
        y(i, j) = gamma_[j] * xhat_(i, j) + beta_[j];
      }
    }
  }
  return y;
}

Matrix BatchNorm::Backward(const Matrix& dy) {
  const std::size_t n = dy.rows();
  const std::size_t d = dim();
  if (dy.cols() != d || xhat_.rows() != n) {
    throw ArgumentError("BatchNorm::Backward: shape mismatch");
  }
  Matrix dx(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum_dy += dy(i, j);
      sum_dy_xhat += dy(i, j) * xhat_(i, j);
    }
    gbeta_[j] += sum_dy;
    ggamma_[j] += sum_dy_xhat;

    if (train_mode_) {
      // full chain rule through the batch mean and variance
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        dx(i, j) = gamma_[j] * inv_std_[j] *
                   (dy(i, j) - inv_n * sum_dy -
                    xhat_(i, j) * inv_n * sum_dy_xhat);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        dx(i, j) = gamma_[j] * inv_std_[j] * dy(i, j);
      }
    }
  }
  return dx;
}

void BatchNorm::ZeroGrad() {
  std::fill(ggamma_.begin(), ggamma_.end(), 0.0);
  std::fill(gbeta_.begin(), gbeta_.end(), 0.0);
}

void BatchNorm::CollectParams(const std::string& prefix, ParamSet* out) {
  out->push_back({prefix + ".gamma", gamma_.data(), ggamma_.data(),
                  gamma_.size()});
  out->push_back({prefix + ".beta", beta_.data(), gbeta_.data(), beta_.size()});
}

Dropout::Dropout(double rate) : rate_(rate) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ArgumentError("Dropout: rate must be in [0, 1)");
  }
}

Matrix Dropout::SampleMask(std::size_t rows, std::size_t cols,
                           Rng* rng) const {
  Matrix mask(rows, cols, 1.0);
  if (rate_ == 0.0) return mask;
  std::bernoulli_distribution keep(1.0 - rate_);
  const double scale = 1.0 / (1.0 - rate_);
  for (double& v : mask.values()) v = keep(*rng) ? scale : 0.0;
  return mask;
}

Matrix Dropout::Forward(const Matrix& x, bool train, Rng* rng) {
  if (!train || rate_ == 0.0) {
    identity_ = true;
    return x;
  }
  identity_ = false;
  mask_ = SampleMask(x.rows(), x.cols(), rng);
  return Hadamard(x, mask_);
}

Matrix Dropout::ForwardWithMask(const Matrix& x, const Matrix& mask) {
  identity_ = false;
  mask_ = mask;
  return Hadamard(x, mask_);
}

Matrix Dropout::Backward(const Matrix& dy) {
  if (identity_) return dy;
  return Hadamard(dy, mask_);
}

LossGrad MseLoss(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ArgumentError("MseLoss: shape mismatch");
  }
  LossGrad out;
  out.grad = Matrix(pred.rows(), pred.cols());
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred.values()[i] - target.values()[i];
    out.value += diff * diff * inv_n;
    out.grad.values()[i] = 2.0 * diff * inv_n;
  }
  return out;
}

LossGrad NllLoss(const Matrix& log_probs, const std::vector<int>& labels) {
  if (log_probs.rows() != labels.size()) {
    throw ArgumentError("NllLoss: batch size mismatch");
  }
  LossGrad out;
  out.grad = Matrix(log_probs.rows(), log_probs.cols());
  const double inv_b = 1.0 / static_cast<double>(log_probs.rows());
  for (std::size_t i = 0; i < log_probs.rows(); ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= log_probs.cols()) {
      throw ArgumentError("NllLoss: label out of range");
    }
    out.value -= log_probs(i, label) * inv_b;
    out.grad(i, label) = -inv_b;
  }
  return out;
}

double FrameAccuracy(const Matrix& scores, const std::vector<int>& labels) {
  if (scores.rows() != labels.size()) {
    throw ArgumentError("FrameAccuracy: batch size mismatch");
  }
  if (scores.rows() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::size_t argmax = 0;
    for (std::size_t j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, argmax)) argmax = j;
    }
    correct += static_cast<int>(argmax) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(scores.rows());
}

}  // namespace dsr
