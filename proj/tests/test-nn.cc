// tests/test-nn.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "dsr/checkpoint.h"
#include "dsr/common.h"
#include "dsr/gradcheck.h"
#include "dsr/init.h"
#include "dsr/layers.h"
#include "dsr/mlp.h"
#include "dsr/optim.h"

using namespace dsr;

namespace {

Matrix RandomMatrix(std::size_t r, std::size_t c, std::uint64_t seed,
                    double scale = 1.0) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(r, c);
  for (double& v : m.values()) v = g(rng);
  return m;
}

std::vector<int> RandomLabels(std::size_t n, int n_classes,
                              std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::uniform_int_distribution<int> d(0, n_classes - 1);
  std::vector<int> labels(n);
  for (int& v : labels) v = d(rng);
  return labels;
}

}  // namespace

TEST_CASE("softmax of a uniform row is uniform") {
  Matrix z(2, 5, 0.37);
  auto y = ActivationForward(Activation::kSoftmax, z);
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(y.values()[i] == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("softmax rows sum to one and log-softmax matches its log") {
  auto z = RandomMatrix(6, 9, 1);
  auto s = ActivationForward(Activation::kSoftmax, z);
  auto ls = ActivationForward(Activation::kLogSoftmax, z);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < s.cols(); ++j) sum += s(i, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < s.cols(); ++j) {
      CHECK(ls(i, j) == doctest::Approx(std::log(s(i, j))).epsilon(1e-9));
    }
  }
}

TEST_CASE("relu gradient is the positive-side indicator") {
  Matrix z(1, 4);
  z(0, 0) = -1.5;
  z(0, 1) = 2.0;
  z(0, 2) = -0.1;
  z(0, 3) = 0.7;
  auto y = ActivationForward(Activation::kRelu, z);
  Matrix dy(1, 4, 1.0);
  auto dz = ActivationBackward(Activation::kRelu, y, dy);
  CHECK(dz(0, 0) == 0.0);
  CHECK(dz(0, 1) == 1.0);
  CHECK(dz(0, 2) == 0.0);
  CHECK(dz(0, 3) == 1.0);
}

TEST_CASE("quadratic toy gradcheck is exact to roundoff") {
  std::vector<double> theta = {1.0, -2.0, 0.5};
  std::vector<double> grad(3, 0.0);
  ParamSet params = {{"theta", theta.data(), grad.data(), 3}};
  auto loss = [&]() {
    return (theta[0] - 3.0) * (theta[0] - 3.0) + 2.0 * theta[1] * theta[1] +
           (theta[2] + 1.0) * (theta[2] + 1.0);
  };
  auto loss_and_grad = [&]() {
    grad[0] = 2.0 * (theta[0] - 3.0);
    grad[1] = 4.0 * theta[1];
    grad[2] = 2.0 * (theta[2] + 1.0);
    return loss();
  };
  auto report = GradCheck(params, loss, loss_and_grad, 1e-5);
  CHECK(report.max_rel_error <= 1e-9);
}

TEST_CASE("two-layer sigmoid mlp gradcheck under 1e-6") {
  Rng rng = MakeRng(5);
  MlpConfig cfg;
  cfg.in_dim = 4;
  cfg.out_dim = 3;
  cfg.hidden = {8, 6};
  cfg.hidden_act = Activation::kSigmoid;
  cfg.output_act = Activation::kLogSoftmax;
  Mlp model(cfg, &rng);
  auto x = RandomMatrix(5, 4, 6);
  auto labels = RandomLabels(5, 3, 7);

  ParamSet params = model.Params();
  auto loss_only = [&]() {
    return NllLoss(model.Forward(x, false, nullptr), labels).value;
  };
  auto loss_and_grad = [&]() {
    model.ZeroGrad();
    auto out = model.Forward(x, false, nullptr);
    auto loss = NllLoss(out, labels);
    model.Backward(loss.grad);
    return loss.value;
  };
  auto report = GradCheck(params, loss_only, loss_and_grad, 1e-5);
  CHECK(report.max_rel_error <= 1e-6);
}

TEST_CASE("dense backward also returns exact input gradients") {
  Rng rng = MakeRng(8);
  Dense layer(6, 4, Activation::kTanh);
  InitGlorot(&layer.weights(), &rng);
  Matrix x = RandomMatrix(3, 6, 9);
  Matrix target = RandomMatrix(3, 4, 10);

  // treat the input as a parameter to reuse the checker
  Matrix xgrad(3, 6);
  ParamSet params = {{"x", x.data(), xgrad.data(), x.size()}};
  auto loss_only = [&]() {
    return MseLoss(layer.Forward(x), target).value;
  };
  auto loss_and_grad = [&]() {
    auto out = layer.Forward(x);
    auto loss = MseLoss(out, target);
    Matrix dx = layer.Backward(loss.grad);
    std::copy(dx.values().begin(), dx.values().end(), xgrad.values().begin());
    return loss.value;
  };
  auto report = GradCheck(params, loss_only, loss_and_grad, 1e-5);
  CHECK(report.max_rel_error <= 1e-6);
}

TEST_CASE("dense rejects shape mismatches") {
  Dense layer(4, 2);
  CHECK_THROWS_AS(layer.Forward(Matrix(3, 5)), ArgumentError);
}

TEST_CASE("batchnorm constant batch returns beta") {
  BatchNorm bn(3);
  Matrix x(4, 3, 2.5);  // constant batch: xhat = 0, output = beta
  auto y = bn.Forward(x, true);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      CHECK(y(i, j) == doctest::Approx(0.01).epsilon(1e-12));
    }
  }
}

TEST_CASE("batchnorm train output is standardized before scale and shift") {
  BatchNorm bn(5);
  std::fill(bn.gamma().begin(), bn.gamma().end(), 1.0);
  std::fill(bn.beta().begin(), bn.beta().end(), 0.0);
  // large input variance makes the eps bias negligible
  auto x = RandomMatrix(64, 5, 11, 1000.0);
  auto y = bn.Forward(x, true);
  for (std::size_t j = 0; j < 5; ++j) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < 64; ++i) mean += y(i, j);
    mean /= 64.0;
    for (std::size_t i = 0; i < 64; ++i) {
      var += (y(i, j) - mean) * (y(i, j) - mean);
    }
    var /= 64.0;
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("batchnorm train mode requires batch of at least two") {
  BatchNorm bn(2);
  CHECK_THROWS_AS(bn.Forward(Matrix(1, 2), true), ArgumentError);
  CHECK_NOTHROW(bn.Forward(Matrix(1, 2), false));
}

TEST_CASE("batchnorm inference is a fixed affine map") {
  BatchNorm bn(3);
  auto warmup = RandomMatrix(32, 3, 13);
  bn.Forward(warmup, true);

  auto x1 = RandomMatrix(4, 3, 14);
  auto y1 = bn.Forward(x1, false);
  // doubling the batch must not change per-sample outputs
  Matrix x2(8, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x2(i, j) = x1(i % 4, j);
  }
  auto y2 = bn.Forward(x2, false);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(y2(i, j) == y1(i % 4, j));
    }
  }
}

TEST_CASE("mlp with batchnorm gradcheck under 1e-5") {
  Rng rng = MakeRng(15);
  MlpConfig cfg;
  cfg.in_dim = 5;
  cfg.out_dim = 3;
  cfg.hidden = {7};
  cfg.hidden_act = Activation::kRelu;
  cfg.output_act = Activation::kLogSoftmax;
  cfg.batchnorm = true;
  Mlp model(cfg, &rng);
  auto x = RandomMatrix(4, 5, 16);  // train-mode BN, batch 4
  auto labels = RandomLabels(4, 3, 17);

  ParamSet params = model.Params();
  auto loss_only = [&]() {
    return NllLoss(model.Forward(x, true, nullptr), labels).value;
  };
  auto loss_and_grad = [&]() {
    model.ZeroGrad();
    auto out = model.Forward(x, true, nullptr);
    auto loss = NllLoss(out, labels);
    model.Backward(loss.grad);
    return loss.value;
  };
  auto report = GradCheck(params, loss_only, loss_and_grad, 1e-5);
  CHECK(report.max_rel_error <= 1e-5);
}

TEST_CASE("loss closed forms") {
  Matrix pred = RandomMatrix(3, 4, 19);
  CHECK(MseLoss(pred, pred).value == 0.0);

  // one-hot-correct prediction: log prob 0 at the label
  Matrix lp(2, 3, -40.0);
  lp(0, 1) = 0.0;
  lp(1, 2) = 0.0;
  CHECK(NllLoss(lp, {1, 2}).value == doctest::Approx(0.0));

  // uniform prediction over n classes
  Matrix uniform(4, 7, std::log(1.0 / 7.0));
  CHECK(NllLoss(uniform, {0, 3, 5, 6}).value ==
        doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("orthogonal init satisfies QtQ = I") {
  Rng rng = MakeRng(21);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{16, 16},
                      {24, 16},
                      {16, 24}}) {
    Matrix w(r, c);
    InitOrthogonal(&w, &rng);
    // for wide matrices rows are orthonormal, otherwise columns
    const Matrix gram = r >= c ? MatMulTN(w, w) : MatMulNT(w, w);
    const std::size_t n = std::min(r, c);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("glorot sample variance is near its target") {
  Rng rng = MakeRng(23);
  Matrix w(100, 1000);
  InitGlorot(&w, &rng);
  double mean = 0.0;
  for (double v : w.values()) mean += v;
  mean /= w.size();
  double var = 0.0;
  for (double v : w.values()) var += (v - mean) * (v - mean);
  var /= w.size();
  const double target = 2.0 / (100.0 + 1000.0);
  CHECK(std::abs(var - target) / target < 0.10);
}

TEST_CASE("relu bias fill") {
  std::vector<double> b(17, 0.0);
  FillBias(&b, 0.1);
  for (double v : b) CHECK(v == 0.1);
}

TEST_CASE("optimizers leave parameters alone at zero gradient") {
  for (auto kind : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
    std::vector<double> theta = {1.0, -2.0};
    std::vector<double> grad = {0.0, 0.0};
    ParamSet params = {{"theta", theta.data(), grad.data(), 2}};
    OptimizerConfig cfg;
    cfg.kind = kind;
    cfg.lr = 0.1;
    Optimizer opt(cfg);
    opt.Step(params);
    CHECK(theta[0] == 1.0);
    CHECK(theta[1] == -2.0);
  }
}

TEST_CASE("single sgd step on f(x) = x^2") {
  std::vector<double> theta = {1.0};
  std::vector<double> grad = {2.0};  // f'(1) = 2
  ParamSet params = {{"theta", theta.data(), grad.data(), 1}};
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::kSgd;
  cfg.lr = 0.1;
  Optimizer opt(cfg);
  opt.Step(params);
  CHECK(theta[0] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("adam first step size is the learning rate for any gradient scale") {
  for (double scale : {1e-4, 1.0, 1e4}) {
    std::vector<double> theta = {0.0};
    std::vector<double> grad = {scale};
    ParamSet params = {{"theta", theta.data(), grad.data(), 1}};
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::kAdam;
    cfg.lr = 0.01;
    Optimizer opt(cfg);
    opt.Step(params);
    CHECK(std::abs(theta[0]) == doctest::Approx(0.01).epsilon(1e-3));
  }
}

TEST_CASE("inverted dropout keeps the activation mean") {
  Rng rng = MakeRng(29);
  Dropout drop(0.3);
  Matrix x(100, 100, 1.0);
  double acc = 0.0;
  for (int trial = 0; trial < 1; ++trial) {
    auto y = drop.Forward(x, true, &rng);  // 1e4 units in one pass
    for (double v : y.values()) acc += v;
  }
  const double mean = acc / static_cast<double>(x.size());
  CHECK(std::abs(mean - 1.0) < 0.02);
}

TEST_CASE("dropout at rate zero is the identity") {
  Rng rng = MakeRng(31);
  Dropout drop(0.0);
  auto x = RandomMatrix(4, 4, 31);
  auto y = drop.Forward(x, true, &rng);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(y.values()[i] == x.values()[i]);
  }
}

TEST_CASE("lr schedule halves exactly when improvement drops") {
  LrSchedule s;
  CHECK(s.Update(0.50) == LrSchedule::Action::kKeep);   // first epoch
  CHECK(s.Update(0.56) == LrSchedule::Action::kKeep);   // +6 percent
  CHECK(s.Update(0.57) == LrSchedule::Action::kKeep);   // +1 percent
  CHECK(s.Update(0.574) == LrSchedule::Action::kHalve); // +0.4 < 0.5 start
  CHECK(s.Update(0.577) == LrSchedule::Action::kHalve); // +0.3 >= 0.1 stop
  CHECK(s.Update(0.5775) == LrSchedule::Action::kStop); // +0.05 < 0.1
}

TEST_CASE("training is bit-deterministic given a seed") {
  auto x = RandomMatrix(64, 6, 37);
  auto labels = RandomLabels(64, 3, 38);
  auto run = [&]() {
    Rng rng = MakeRng(40);
    MlpConfig cfg;
    cfg.in_dim = 6;
    cfg.out_dim = 3;
    cfg.hidden = {8};
    cfg.output_act = Activation::kLogSoftmax;
    Mlp model(cfg, &rng);
    TrainConfig tc;
    tc.optimizer.kind = OptimizerKind::kSgd;
    tc.optimizer.lr = 0.05;
    tc.batch_size = 16;
    tc.max_epochs = 5;
    tc.seed = 41;
    return TrainClassifier(&model, x, labels, x, labels, tc);
  };
  auto a = run();
  auto b = run();
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    CHECK(a.epochs[i].train_loss == b.epochs[i].train_loss);
    CHECK(a.epochs[i].dev_loss == b.epochs[i].dev_loss);
    CHECK(a.epochs[i].dev_metric == b.epochs[i].dev_metric);
    CHECK(a.epochs[i].lr == b.epochs[i].lr);
  }
}

TEST_CASE("training rejects an empty dataset") {
  Rng rng = MakeRng(43);
  MlpConfig cfg;
  cfg.in_dim = 2;
  cfg.out_dim = 2;
  cfg.output_act = Activation::kLogSoftmax;
  Mlp model(cfg, &rng);
  TrainConfig tc;
  CHECK_THROWS_AS(
      TrainClassifier(&model, Matrix(0, 2), {}, Matrix(0, 2), {}, tc),
      ArgumentError);
}

TEST_CASE("linear regression toy converges to the least-squares oracle") {
  // y = X w* + noise; the normal equations give the oracle solution
  const std::size_t n = 256, d = 4;
  auto x = RandomMatrix(n, d, 47);
  Matrix w_true(1, d);
  w_true(0, 0) = 0.5;
  w_true(0, 1) = -1.0;
  w_true(0, 2) = 2.0;
  w_true(0, 3) = 0.1;
  Rng noise_rng = MakeRng(48);
  std::normal_distribution<double> g(0.0, 0.01);
  Matrix y(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += x(i, j) * w_true(0, j);
    y(i, 0) = acc + g(noise_rng);
  }

  // normal equations (X^T X) w = X^T y by Gaussian elimination
  Matrix xtx = MatMulTN(x, x);
  Matrix xty = MatMulTN(x, y);
  std::vector<double> w_ls(d);
  {
    Matrix a = xtx;
    std::vector<double> rhs(d);
    for (std::size_t i = 0; i < d; ++i) rhs[i] = xty(i, 0);
    for (std::size_t k = 0; k < d; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < d; ++i) {
        if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
      }
      for (std::size_t j = 0; j < d; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(rhs[k], rhs[piv]);
      for (std::size_t i = k + 1; i < d; ++i) {
        const double f = a(i, k) / a(k, k);
        for (std::size_t j = k; j < d; ++j) a(i, j) -= f * a(k, j);
        rhs[i] -= f * rhs[k];
      }
    }
    for (std::size_t i = d; i-- > 0;) {
      double acc = rhs[i];
      for (std::size_t j = i + 1; j < d; ++j) acc -= a(i, j) * w_ls[j];
      w_ls[i] = acc / a(i, i);
    }
  }

  Rng rng = MakeRng(49);
  MlpConfig cfg;
  cfg.in_dim = d;
  cfg.out_dim = 1;
  Mlp model(cfg, &rng);  // no hidden layers: a pure linear map
  TrainConfig tc;
  tc.optimizer.kind = OptimizerKind::kAdam;
  tc.optimizer.lr = 0.02;
  tc.batch_size = 32;
  tc.max_epochs = 200;
  tc.schedule.improve_threshold = 1e-7;
  tc.schedule.stop_threshold = 1e-9;
  tc.seed = 50;
  TrainRegressor(&model, x, y, x, y, tc);

  for (std::size_t j = 0; j < d; ++j) {
    CHECK(std::abs(model.head().weights()(0, j) - w_ls[j]) < 1e-3);
  }
}

TEST_CASE("warm start inherits parameters bit for bit and trains no slower") {
  // clean task and a smeared+noisy variant of the same class geometry
  const std::size_t n = 512, d = 10;
  const int classes = 4;
  Rng rng = MakeRng(53);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix means(classes, d);
  for (double& v : means.values()) v = 1.2 * g(rng);

  auto sample = [&](std::size_t count, double smear, std::uint64_t seed) {
    Rng r2 = MakeRng(seed);
    std::normal_distribution<double> noise(0.0, 0.4);
    std::uniform_int_distribution<int> cls(0, classes - 1);
    Matrix x(count, d);
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
      const int c = cls(r2);
      labels[i] = c;
      for (std::size_t j = 0; j < d; ++j) {
        // smear mixes neighbouring dims, a crude stand-in for reverberation
        const double base = means(c, j);
        const double prev = means(c, (j + d - 1) % d);
        x(i, j) = (1.0 - smear) * base + smear * prev + noise(r2);
      }
    }
    return std::make_pair(x, labels);
  };

  auto [clean_x, clean_l] = sample(n, 0.0, 54);
  auto [rev_x, rev_l] = sample(n, 0.45, 55);
  auto [dev_x, dev_l] = sample(256, 0.45, 56);

  MlpConfig cfg;
  cfg.in_dim = d;
  cfg.out_dim = classes;
  cfg.hidden = {16};
  cfg.output_act = Activation::kLogSoftmax;

  TrainConfig tc;
  tc.optimizer.kind = OptimizerKind::kSgd;
  tc.optimizer.lr = 0.2;
  tc.batch_size = 64;
  tc.max_epochs = 30;
  tc.schedule.improve_threshold = 1e-9;  // run all epochs
  tc.schedule.stop_threshold = 0.0;
  tc.seed = 57;

  Rng init_rng = MakeRng(58);
  Mlp clean_model(cfg, &init_rng);
  TrainClassifier(&clean_model, clean_x, clean_l, dev_x, dev_l, tc);

  // snapshot and compare after the copy, before any finetune step
  ParamSet before = clean_model.Params();
  std::vector<std::vector<double>> snapshot;
  for (auto& p : before) {
    snapshot.emplace_back(p.value, p.value + p.size);
  }

  auto warm = WarmStartFinetuneClassifier(clean_model, rev_x, rev_l, dev_x,
                                          dev_l, 0.5, tc);
  ParamSet after = clean_model.Params();
  for (std::size_t p = 0; p < after.size(); ++p) {
    for (std::size_t i = 0; i < after[p].size; ++i) {
      CHECK(after[p].value[i] == snapshot[p][i]);
    }
  }

  Rng cold_rng = MakeRng(58);
  Mlp cold_model(cfg, &cold_rng);
  auto cold = TrainClassifier(&cold_model, rev_x, rev_l, dev_x, dev_l, tc);

  // epochs to reach a fixed dev loss both runs attain
  const double target_nll = 0.20;
  auto epochs_to = [&](const TrainResult& r) {
    for (std::size_t i = 0; i < r.epochs.size(); ++i) {
      if (r.epochs[i].dev_loss <= target_nll) return i + 1;
    }
    return r.epochs.size() + 1;
  };
  REQUIRE(epochs_to(cold) <= cold.epochs.size());
  CHECK(epochs_to(warm.log) <= epochs_to(cold));
}

TEST_CASE("warm start with factor one on the same data continues training") {
  auto x = RandomMatrix(64, 5, 61);
  auto labels = RandomLabels(64, 3, 62);
  MlpConfig cfg;
  cfg.in_dim = 5;
  cfg.out_dim = 3;
  cfg.hidden = {6};
  cfg.output_act = Activation::kLogSoftmax;
  TrainConfig tc;
  tc.optimizer.lr = 0.1;
  tc.batch_size = 16;
  tc.max_epochs = 3;
  tc.seed = 63;

  Rng r1 = MakeRng(64);
  Mlp m1(cfg, &r1);
  TrainClassifier(&m1, x, labels, x, labels, tc);
  auto warm = WarmStartFinetuneClassifier(m1, x, labels, x, labels, 1.0, tc);

  // identical to manually continuing with a fresh optimizer and shuffle
  Rng r2 = MakeRng(64);
  Mlp m2(cfg, &r2);
  TrainClassifier(&m2, x, labels, x, labels, tc);
  TrainClassifier(&m2, x, labels, x, labels, tc);

  ParamSet pa = warm.model.Params();
  ParamSet pb = m2.Params();
  for (std::size_t p = 0; p < pa.size(); ++p) {
    for (std::size_t i = 0; i < pa[p].size; ++i) {
      CHECK(pa[p].value[i] == pb[p].value[i]);
    }
  }
}

TEST_CASE("dsrm checkpoints round trip bit identically") {
  Rng rng = MakeRng(67);
  MlpConfig cfg;
  cfg.in_dim = 7;
  cfg.out_dim = 4;
  cfg.hidden = {5};
  cfg.batchnorm = true;
  Mlp model(cfg, &rng);
  ParamSet params = model.Params();

  nlohmann::json header;
  header["arch"] = "mlp";
  header["seed"] = 67;
  const char* p1 = "test_cp1.dsrm";
  const char* p2 = "test_cp2.dsrm";
  SaveCheckpoint(p1, header, params);
  auto cp = LoadCheckpoint(p1);
  CHECK(cp.header["arch"] == "mlp");

  Rng rng2 = MakeRng(99);
  Mlp restored(cfg, &rng2);
  ParamSet rp = restored.Params();
  RestoreParams(cp, rp);
  SaveCheckpoint(p2, header, rp);

  std::FILE* f1 = std::fopen(p1, "rb");
  std::FILE* f2 = std::fopen(p2, "rb");
  REQUIRE(f1 != nullptr);
  REQUIRE(f2 != nullptr);
  int c1, c2;
  do {
    c1 = std::fgetc(f1);
    c2 = std::fgetc(f2);
    CHECK(c1 == c2);
  } while (c1 != EOF && c2 != EOF);
  std::fclose(f1);
  std::fclose(f2);
  std::remove(p1);
  std::remove(p2);
}

TEST_CASE("dsrm loader rejects a wrong magic") {
  const char* p = "test_bad.dsrm";
  std::FILE* f = std::fopen(p, "wb");
  std::fputs("JUNKJUNKJUNK", f);
  std::fclose(f);
  CHECK_THROWS_AS(LoadCheckpoint(p), FormatError);
  std::remove(p);
}
