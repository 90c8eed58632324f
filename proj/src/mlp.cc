// src/mlp.cc

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

#include "dsr/mlp.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "dsr/init.h"

namespace dsr {

MlpTrunk::MlpTrunk(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                   Activation act, bool batchnorm, double dropout, Rng* rng)
    : act_(act), batchnorm_(batchnorm), has_dropout_(dropout > 0.0) {
  std::size_t prev = in_dim;
  for (std::size_t h : hidden) {
    Dense d(prev, h, Activation::kLinear);
    InitGlorot(&d.weights(), rng);
    dense_.push_back(std::move(d));
    if (batchnorm) bn_.emplace_back(h);
    if (has_dropout_) drop_.emplace_back(dropout);
    prev = h;
  }
  act_out_.resize(dense_.size());
  out_dim_ = prev;
}

Matrix MlpTrunk::Forward(const Matrix& x, bool train, Rng* rng) {
  Matrix h = x;
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    h = dense_[i].Forward(h);
    if (batchnorm_) h = bn_[i].Forward(h, train);
    h = ActivationForward(act_, h);
    act_out_[i] = h;
    if (has_dropout_) h = drop_[i].Forward(h, train, rng);
  }
  return h;
}

Matrix MlpTrunk::Backward(const Matrix& dy) {
  Matrix d = dy;
  for (std::size_t i = dense_.size(); i-- > 0;) {
    if (has_dropout_) d = drop_[i].Backward(d);
    d = ActivationBackward(act_, act_out_[i], d);
    if (batchnorm_) d = bn_[i].Backward(d);
    d = dense_[i].Backward(d);
  }
  return d;
}

void MlpTrunk::ZeroGrad() {
  for (auto& d : dense_) d.ZeroGrad();
  for (auto& b : bn_) b.ZeroGrad();
}

void MlpTrunk::CollectParams(const std::string& prefix, ParamSet* out) {
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    const std::string layer = prefix + ".h" + std::to_string(i);
    dense_[i].CollectParams(layer, out);
    if (batchnorm_) bn_[i].CollectParams(layer + ".bn", out);
  }
}

Mlp::Mlp(const MlpConfig& config, Rng* rng)
    : config_(config),
      trunk_(config.in_dim, config.hidden, config.hidden_act, config.batchnorm,
             config.dropout, rng),
      head_(config.hidden.empty() ? config.in_dim : config.hidden.back(),
            config.out_dim, config.output_act) {
  InitGlorot(&head_.weights(), rng);
  if (config.relu_bias != 0.0 && config.hidden_act == Activation::kRelu) {
    for (std::size_t i = 0; i < trunk_.n_layers(); ++i) {
      FillBias(&trunk_.dense(i).bias(), config.relu_bias);
    }
  }
}

Matrix Mlp::Forward(const Matrix& x, bool train, Rng* rng) {
  return head_.Forward(trunk_.Forward(x, train, rng));
}

Matrix Mlp::Backward(const Matrix& dy) {
  return trunk_.Backward(head_.Backward(dy));
}

void Mlp::ZeroGrad() {
  trunk_.ZeroGrad();
  head_.ZeroGrad();
}

void Mlp::CollectParams(const std::string& prefix, ParamSet* out) {
  trunk_.CollectParams(prefix, out);
  head_.CollectParams(prefix + ".head", out);
}

ParamSet Mlp::Params() {
  ParamSet out;
  CollectParams("mlp", &out);
  return out;
}

namespace {

struct EvalResult {
  double loss = 0.0;
  double metric = 0.0;
};

EvalResult Evaluate(Mlp* model, const Matrix& x, const std::vector<int>* labels,
                    const Matrix* targets) {
  Matrix out = model->Forward(x, /*train=*/false, nullptr);
  EvalResult r;
  if (labels != nullptr) {
    r.loss = NllLoss(out, *labels).value;
    r.metric = FrameAccuracy(out, *labels);
  } else {
    r.loss = MseLoss(out, *targets).value;
    r.metric = -r.loss;
  }
  return r;
}

TrainResult TrainImpl(Mlp* model, const Matrix& x,
                      const std::vector<int>* labels, const Matrix* targets,
                      const Matrix& dev_x, const std::vector<int>* dev_labels,
                      const Matrix* dev_targets, const TrainConfig& config) {
  if (x.rows() == 0) throw ArgumentError("Train: empty dataset");
  Rng rng = MakeRng(config.seed);
  Optimizer opt(config.optimizer);
  LrSchedule schedule = config.schedule;
  ParamSet params = model->Params();

  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);

    double train_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      Matrix bx(n, x.cols());
      std::vector<int> bl(n);
      Matrix bt(n, targets != nullptr ? targets->cols() : 0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = order[start + i];
        for (std::size_t j = 0; j < x.cols(); ++j) bx(i, j) = x(src, j);
        if (labels != nullptr) bl[i] = (*labels)[src];
        if (targets != nullptr) {
          for (std::size_t j = 0; j < targets->cols(); ++j) {
            bt(i, j) = (*targets)(src, j);
          }
        }
      }
      model->ZeroGrad();
      Matrix out = model->Forward(bx, /*train=*/true, &rng);
      LossGrad loss = labels != nullptr ? NllLoss(out, bl) : MseLoss(out, bt);
      model->Backward(loss.grad);
      opt.Step(params);
      train_loss += loss.value;
      ++batches;
    }

    EvalResult dev = Evaluate(model, dev_x, dev_labels, dev_targets);
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = train_loss / static_cast<double>(batches);
    log.dev_loss = dev.loss;
    log.dev_metric = dev.metric;
    log.lr = opt.lr();

    const LrSchedule::Action action = schedule.Update(dev.metric);
    if (action == LrSchedule::Action::kHalve) {
      opt.HalveLr();
      log.halved = true;
    }
    result.epochs.push_back(log);
    if (action == LrSchedule::Action::kStop) {
      result.stopped_by_schedule = true;
      break;
    }
  }
  return result;
}

}  // namespace

TrainResult TrainClassifier(Mlp* model, const Matrix& x,
                            const std::vector<int>& labels,
                            const Matrix& dev_x,
                            const std::vector<int>& dev_labels,
                            const TrainConfig& config) {
  return TrainImpl(model, x, &labels, nullptr, dev_x, &dev_labels, nullptr,
                   config);
}

TrainResult TrainRegressor(Mlp* model, const Matrix& x, const Matrix& targets,
                           const Matrix& dev_x, const Matrix& dev_targets,
                           const TrainConfig& config) {
  return TrainImpl(model, x, nullptr, &targets, dev_x, nullptr, &dev_targets,
                   config);
}

WarmStartResult WarmStartFinetuneClassifier(
    const Mlp& pretrained, const Matrix& x, const std::vector<int>& labels,
    const Matrix& dev_x, const std::vector<int>& dev_labels, double lr_factor,
    const TrainConfig& config) {
  WarmStartResult out;
  out.model = pretrained;  // parameters inherited bit for bit
  TrainConfig finetune = config;
  finetune.optimizer.lr *= lr_factor;
  out.log = TrainClassifier(&out.model, x, labels, dev_x, dev_labels, finetune);
  return out;
}

}  // namespace dsr
