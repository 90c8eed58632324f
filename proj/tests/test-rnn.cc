// tests/test-rnn.cc

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
#include <random>

#include "dsr/common.h"
#include "dsr/gradcheck.h"
#include "dsr/rnn.h"
#include "dsr/synthetic.h"

using namespace dsr;

namespace {

Seq RandomSeq(std::size_t t_len, std::size_t batch, std::size_t dim,
              std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Seq x(t_len);
  for (auto& m : x) {
    m = Matrix(batch, dim);
    for (double& v : m.values()) v = g(rng);
  }
  return x;
}

Seq RandomSeqGrad(const Seq& like, std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Seq d(like.size());
  for (std::size_t t = 0; t < like.size(); ++t) {
    d[t] = Matrix(like[t].rows(), like[t].cols());
    for (double& v : d[t].values()) v = g(rng);
  }
  return d;
}

// Scalar loss over the outputs: sum of c_t . h_t with fixed random c, which
// keeps the finite-difference oracle simple and well scaled.
double SeqLoss(const Seq& h, const Seq& c) {
  double acc = 0.0;
  for (std::size_t t = 0; t < h.size(); ++t) {
    for (std::size_t i = 0; i < h[t].size(); ++i) {
      acc += h[t].values()[i] * c[t].values()[i];
    }
  }
  return acc;
}

// The fourth-order stencil keeps subtraction noise well under the strict
// thresholds for near-zero reset-gate gradients. Smooth (tanh/sigmoid) cells
// take the wide default step; ReLU cells need a narrow one so the stencil
// never straddles an activation kink (seeds are pinned accordingly).
double StackGradCheck(RnnStack* stack, const Seq& x, RunMode mode,
                      std::uint64_t cseed, double eps_fd) {
  Seq probe = stack->Forward(x, mode, nullptr);
  const Seq c = RandomSeqGrad(probe, cseed);
  ParamSet params;
  stack->CollectParams("stack", &params);
  auto loss_only = [&]() {
    return SeqLoss(stack->Forward(x, mode, nullptr), c);
  };
  auto loss_and_grad = [&]() {
    stack->ZeroGrad();
    const Seq h = stack->Forward(x, mode, nullptr);
    stack->Backward(c);
    return SeqLoss(h, c);
  };
  return GradCheck4(params, loss_only, loss_and_grad, eps_fd).max_rel_error;
}

}  // namespace

TEST_CASE("gru step closed forms") {
  Rng rng = MakeRng(3);
  GruCell cell(3, 4, &rng);
  Matrix x(2, 3, 0.5);
  Matrix h_prev(2, 4);
  for (std::size_t i = 0; i < h_prev.size(); ++i) {
    h_prev.values()[i] = 0.1 * static_cast<double>(i + 1);
  }

  SUBCASE("saturated update gate keeps the previous state") {
    GruCell keep = cell;
    keep.wz_.setZero();
    keep.uz_.setZero();
    std::fill(keep.bz_.begin(), keep.bz_.end(), 400.0);  // z = 1 exactly
    auto out = GruStep(keep, x, h_prev);
    for (std::size_t i = 0; i < out.h.size(); ++i) {
      CHECK(out.h.values()[i] == h_prev.values()[i]);
    }
  }

  SUBCASE("all-zero parameters halve the previous state") {
    GruCell zero = cell;
    zero.wz_.setZero();
    zero.wr_.setZero();
    zero.wh_.setZero();
    zero.uz_.setZero();
    zero.ur_.setZero();
    zero.uh_.setZero();
    std::fill(zero.bz_.begin(), zero.bz_.end(), 0.0);
    std::fill(zero.br_.begin(), zero.br_.end(), 0.0);
    std::fill(zero.bh_.begin(), zero.bh_.end(), 0.0);
    auto out = GruStep(zero, x, h_prev);
    for (std::size_t i = 0; i < out.h.size(); ++i) {
      CHECK(out.z.values()[i] == doctest::Approx(0.5));
      CHECK(out.r.values()[i] == doctest::Approx(0.5));
      CHECK(out.candidate.values()[i] == doctest::Approx(0.0));
      CHECK(out.h.values()[i] ==
            doctest::Approx(0.5 * h_prev.values()[i]).epsilon(1e-12));
    }
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(GruStep(cell, Matrix(2, 5), h_prev), ArgumentError);
  }
}

TEST_CASE("mgru equals gru with the reset gate pinned to one") {
  Rng rng = MakeRng(5);
  GruCell gru(3, 4, &rng);
  // pin r = 1 exactly
  gru.wr_.setZero();
  gru.ur_.setZero();
  std::fill(gru.br_.begin(), gru.br_.end(), 400.0);

  Rng rng2 = MakeRng(6);
  MGruCell mgru(3, 4, &rng2);
  mgru.wz_ = gru.wz_;
  mgru.wh_ = gru.wh_;
  mgru.uz_ = gru.uz_;
  mgru.uh_ = gru.uh_;
  mgru.bz_ = gru.bz_;
  mgru.bh_ = gru.bh_;

  Seq x = RandomSeq(6, 2, 3, 7);
  Seq hg = gru.Forward(x, RunMode::kInference);
  Seq hm = mgru.Forward(x, RunMode::kInference);
  for (std::size_t t = 0; t < x.size(); ++t) {
    for (std::size_t i = 0; i < hg[t].size(); ++i) {
      CHECK(hg[t].values()[i] == hm[t].values()[i]);  // bit comparable
    }
  }

  SUBCASE("all-zero mgru params halve the state") {
    MGruCell zero = mgru;
    zero.wz_.setZero();
    zero.wh_.setZero();
    zero.uz_.setZero();
    zero.uh_.setZero();
    std::fill(zero.bz_.begin(), zero.bz_.end(), 0.0);
    std::fill(zero.bh_.begin(), zero.bh_.end(), 0.0);
    Matrix h_prev(2, 4, 0.8);
    auto out = MGruStep(zero, Matrix(2, 3, 1.0), h_prev);
    for (std::size_t i = 0; i < out.h.size(); ++i) {
      CHECK(out.h.values()[i] == doctest::Approx(0.4).epsilon(1e-12));
    }
  }
}

TEST_CASE("ligru step closed forms") {
  Rng rng = MakeRng(9);
  LiGruCell cell(3, 4, &rng);

  SUBCASE("all-zero weights with beta zero halve the state") {
    LiGruCell zero = cell;
    zero.wz_.setZero();
    zero.wh_.setZero();
    zero.uz_.setZero();
    zero.uh_.setZero();
    std::fill(zero.bn_z_.beta().begin(), zero.bn_z_.beta().end(), 0.0);
    std::fill(zero.bn_h_.beta().begin(), zero.bn_h_.beta().end(), 0.0);
    Matrix h_prev(2, 4, 0.6);
    // inference-mode BN keeps the zero pre-activations at beta = 0
    auto out = LiGruStep(&zero, Matrix(2, 3, 1.0), h_prev, false);
    for (std::size_t i = 0; i < out.h.size(); ++i) {
      CHECK(out.z.values()[i] == doctest::Approx(0.5));
      CHECK(out.candidate.values()[i] == doctest::Approx(0.0));
      CHECK(out.h.values()[i] == doctest::Approx(0.3).epsilon(1e-12));
    }
  }

  SUBCASE("saturated update gate preserves the state over 100 steps") {
    LiGruCell keep = cell;
    keep.wz_.setZero();
    // recurrent push keeps z at 1 whenever the state is positive
    keep.uz_.setZero();
    for (std::size_t i = 0; i < 4; ++i) keep.uz_(i, i) = 500.0;
    Matrix h = Matrix(2, 4, 1.0);
    const Matrix h0 = h;
    for (int step = 0; step < 100; ++step) {
      h = LiGruStep(&keep, Matrix(2, 3, 0.3), h, false).h;
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
      CHECK(h.values()[i] == doctest::Approx(h0.values()[i]).epsilon(1e-12));
    }
  }

  SUBCASE("train-mode step with batch 1 is rejected") {
    CHECK_THROWS_AS(LiGruStep(&cell, Matrix(1, 3, 0.5), Matrix(1, 4), true),
                    ArgumentError);
  }
}

TEST_CASE("bptt matches finite differences for every cell kind") {
  // relative error <= 1e-5 at float64, sequences <= 8, hidden <= 16;
  // 1e-6 where batch normalization is absent
  const std::size_t t_len = 5, batch = 3, in = 4, hidden = 8;
  const Seq x = RandomSeq(t_len, batch, in, 11);

  SUBCASE("vanilla relu rnn") {
    Rng rng = MakeRng(12);
    RnnStackConfig cfg{in, {{CellKind::kVanillaRelu, hidden, false}}, 0.0};
    RnnStack stack(cfg, &rng);
    CHECK(StackGradCheck(&stack, x, RunMode::kInference, 13, 1e-4) <= 1e-6);
  }
  SUBCASE("gru") {
    Rng rng = MakeRng(14);
    RnnStackConfig cfg{in, {{CellKind::kGru, hidden, false}}, 0.0};
    RnnStack stack(cfg, &rng);
    CHECK(StackGradCheck(&stack, x, RunMode::kInference, 15, 1e-3) <= 1e-6);
  }
  SUBCASE("mgru") {
    Rng rng = MakeRng(16);
    RnnStackConfig cfg{in, {{CellKind::kMGru, hidden, false}}, 0.0};
    RnnStack stack(cfg, &rng);
    CHECK(StackGradCheck(&stack, x, RunMode::kInference, 17, 1e-3) <= 1e-6);
  }
  SUBCASE("ligru with train-mode batchnorm") {
    Rng rng = MakeRng(18);
    RnnStackConfig cfg{in, {{CellKind::kLiGru, hidden, false}}, 0.0};
    RnnStack stack(cfg, &rng);
    CHECK(StackGradCheck(&stack, x, RunMode::kTrain, 19, 1e-4) <= 1e-5);
  }
}

TEST_CASE("bptt through a stacked bidirectional li-gru") {
  const Seq x = RandomSeq(6, 2, 3, 701);
  Rng rng = MakeRng(100);
  RnnStackConfig cfg{3,
                     {{CellKind::kLiGru, 6, true}, {CellKind::kLiGru, 5, true}},
                     0.0};
  RnnStack stack(cfg, &rng);
  CHECK(StackGradCheck(&stack, x, RunMode::kTrain, 702, 1e-4) <= 1e-5);
}

TEST_CASE("bptt through a bidirectional gru stack without bn") {
  const Seq x = RandomSeq(7, 2, 3, 24);
  Rng rng = MakeRng(25);
  RnnStackConfig cfg{3,
                     {{CellKind::kGru, 5, true}, {CellKind::kMGru, 4, false}},
                     0.0};
  RnnStack stack(cfg, &rng);
  CHECK(StackGradCheck(&stack, x, RunMode::kInference, 26, 1e-3) <= 1e-6);
}

TEST_CASE("memory-keep: saturated update gate transports h0 and gradients") {
  Rng rng = MakeRng(27);
  GruCell cell(3, 4, &rng);
  cell.wz_.setZero();
  cell.uz_.setZero();
  std::fill(cell.bz_.begin(), cell.bz_.end(), 400.0);  // z = 1

  const std::size_t t_len = 12;
  Seq x = RandomSeq(t_len, 2, 3, 28);
  Seq h = cell.Forward(x, RunMode::kInference);
  // h0 = 0 is transported unchanged
  for (std::size_t t = 0; t < t_len; ++t) {
    for (double v : h[t].values()) CHECK(v == 0.0);
  }

  // dh_T/dh_0 = I: feed a gradient only at the last step and read dh0
  Seq dh(t_len);
  for (std::size_t t = 0; t < t_len; ++t) dh[t] = Matrix(2, 4);
  dh[t_len - 1](0, 2) = 1.0;
  dh[t_len - 1](1, 0) = -2.5;
  cell.ZeroGrad();
  cell.Backward(dh);
  const Matrix& dh0 = cell.initial_state_grad();
  CHECK(dh0(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dh0(1, 0) == doctest::Approx(-2.5).epsilon(1e-12));
  double off = 0.0;
  for (std::size_t i = 0; i < dh0.size(); ++i) off += std::abs(dh0.values()[i]);
  CHECK(off == doctest::Approx(3.5).epsilon(1e-9));
}

TEST_CASE("unidirectional output is causal") {
  Rng rng = MakeRng(31);
  RnnStackConfig cfg{3, {{CellKind::kLiGru, 5, false}}, 0.0};
  RnnStack stack(cfg, &rng);
  Seq x = RandomSeq(6, 1, 3, 32);
  Seq h1 = stack.Forward(x, RunMode::kInference, nullptr);

  Seq x2 = x;
  x2[4](0, 1) += 10.0;  // perturb a future input
  Seq h2 = stack.Forward(x2, RunMode::kInference, nullptr);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t i = 0; i < h1[t].size(); ++i) {
      CHECK(h1[t].values()[i] == h2[t].values()[i]);
    }
  }
  bool differs = false;
  for (std::size_t i = 0; i < h1[4].size(); ++i) {
    differs = differs || h1[4].values()[i] != h2[4].values()[i];
  }
  CHECK(differs);
}

TEST_CASE("palindromic input through tied bidirectional weights") {
  Rng rng = MakeRng(33);
  auto fwd = std::make_unique<GruCell>(3, 4, &rng);
  auto bwd = fwd->Clone();
  BidirectionalCell cell(std::move(fwd), std::move(bwd));

  // palindrome x_t = x_{T-1-t}
  Seq x = RandomSeq(3, 1, 3, 34);
  Seq pal = {x[0], x[1], x[2], x[1], x[0]};
  Seq h = cell.Forward(pal, RunMode::kInference);
  const std::size_t t_len = pal.size();
  for (std::size_t t = 0; t < t_len; ++t) {
    // swapping the two halves of the concat flips time
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(h[t](0, j) ==
            doctest::Approx(h[t_len - 1 - t](0, 4 + j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("run sequence rejects empty input") {
  Rng rng = MakeRng(35);
  RnnStackConfig cfg{3, {{CellKind::kGru, 4, false}}, 0.0};
  RnnStack stack(cfg, &rng);
  Seq empty;
  CHECK_THROWS_AS(RunSequence(&stack, empty, RunMode::kInference),
                  ArgumentError);
}

TEST_CASE("shared-time dropout drops the same units at every step") {
  Rng rng = MakeRng(37);
  RnnStackConfig cfg{3, {{CellKind::kMGru, 16, false}}, 0.4};
  RnnStack stack(cfg, &rng);
  Seq x = RandomSeq(10, 1, 3, 38);
  Rng drop_rng = MakeRng(39);
  Seq h = stack.Forward(x, RunMode::kTrain, &drop_rng);
  const Matrix& mask = stack.last_dropout_masks()[0];
  bool any_dropped = false;
  for (std::size_t j = 0; j < 16; ++j) {
    const bool dropped = mask(0, j) == 0.0;
    any_dropped = any_dropped || dropped;
    for (std::size_t t = 0; t < h.size(); ++t) {
      if (dropped) {
        CHECK(h[t](0, j) == 0.0);
      }
    }
  }
  CHECK(any_dropped);
}

TEST_CASE("ligru inference is deterministic and batch-size independent") {
  Rng rng = MakeRng(41);
  RnnStackConfig cfg{3, {{CellKind::kLiGru, 5, false}}, 0.0};
  RnnStack stack(cfg, &rng);
  // run one batch of two identical rows and one of a single row
  Seq x1 = RandomSeq(5, 1, 3, 42);
  Seq x2(x1.size());
  for (std::size_t t = 0; t < x1.size(); ++t) {
    x2[t] = Matrix(2, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      x2[t](0, j) = x1[t](0, j);
      x2[t](1, j) = x1[t](0, j);
    }
  }
  Seq h1 = stack.Forward(x1, RunMode::kInference, nullptr);
  Seq h2 = stack.Forward(x2, RunMode::kInference, nullptr);
  for (std::size_t t = 0; t < h1.size(); ++t) {
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(h1[t](0, j) == h2[t](0, j));
      CHECK(h1[t](0, j) == h2[t](1, j));
    }
  }
}

TEST_CASE("ligru state clamp never fires under batch normalization") {
  Rng rng = MakeRng(43);
  RnnStackConfig cfg{4, {{CellKind::kLiGru, 8, false}}, 0.0};
  RnnStack stack(cfg, &rng);
  Seq x = RandomSeq(50, 4, 4, 44);
  for (auto& m : x) {
    for (double& v : m.values()) v *= 20.0;  // aggressive inputs
  }
  stack.Forward(x, RunMode::kTrain, nullptr);
  auto* cell = dynamic_cast<LiGruCell*>(&stack.layer(0));
  REQUIRE(cell != nullptr);
  CHECK(cell->clamp_count() == 0);
}

TEST_CASE("parameter counts per cell kind") {
  const std::size_t in = 10, hidden = 8;
  Rng rng = MakeRng(45);

  GruCell gru(in, hidden, &rng);
  CHECK(gru.CountParams().total() ==
        3 * (in * hidden + hidden * hidden + hidden));

  LiGruCell ligru(in, hidden, &rng);
  CHECK(ligru.CountParams().total() ==
        2 * (in * hidden + hidden * hidden) + 4 * hidden);

  MGruCell mgru(in, hidden, &rng);
  CHECK(mgru.CountParams().total() ==
        2 * (in * hidden + hidden * hidden + hidden));

  // recurrent weight blocks alone: Li-GRU/GRU = 2/3 exactly
  const double gru_w = static_cast<double>(gru.CountParams().weights);
  const double ligru_w = static_cast<double>(ligru.CountParams().weights);
  CHECK(ligru_w / gru_w == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("table-scale parameter ratio of li-gru to gru") {
  // 5 bidirectional layers, 465 units per direction, 40-dim input, and a
  // softmax over context-dependent targets
  const std::size_t classes = 2500;
  auto count = [&](CellKind kind) {
    Rng rng = MakeRng(46);
    RnnStackConfig cfg;
    cfg.in_dim = 40;
    for (int l = 0; l < 5; ++l) {
      cfg.layers.push_back({kind, 465, true});
    }
    RnnStack stack(cfg, &rng);
    const ParamCounts pc = stack.CountParams();
    const std::size_t head = stack.out_dim() * classes + classes;
    return pc.total() + head;
  };
  const double gru = static_cast<double>(count(CellKind::kGru));
  const double ligru = static_cast<double>(count(CellKind::kLiGru));
  CHECK(std::abs(ligru / gru - 7.4 / 10.3) < 0.02 * (7.4 / 10.3));
}

TEST_CASE("gate correlation identities and oracle") {
  SUBCASE("identical series make C(z,r) equal C(z,z)") {
    std::vector<std::vector<double>> z = {{0.3, 0.6, 0.4, 0.8, 0.5}};
    auto gc = GateCorrelationFromSeries(z, z, 3);
    for (std::size_t i = 0; i < gc.czr.size(); ++i) {
      CHECK(gc.czr[i] == doctest::Approx(gc.czz[i]).epsilon(1e-12));
    }
  }

  SUBCASE("random series match the nested-sum oracle") {
    Rng rng = MakeRng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> z(3), r(3);
    for (int utt = 0; utt < 3; ++utt) {
      z[utt].resize(20);
      r[utt].resize(20);
      for (int t = 0; t < 20; ++t) {
        z[utt][t] = u(rng);
        r[utt][t] = u(rng);
      }
    }
    const long max_lag = 5;
    auto gc = GateCorrelationFromSeries(z, r, max_lag);

    // independent nested-sum oracle
    std::vector<double> czr(2 * max_lag + 1, 0.0), czz(2 * max_lag + 1, 0.0);
    for (int utt = 0; utt < 3; ++utt) {
      for (long lag = -max_lag; lag <= max_lag; ++lag) {
        for (long t = 0; t < 20; ++t) {
          const long s = t + lag;
          if (s >= 0 && s < 20) {
            czr[lag + max_lag] += z[utt][t] * r[utt][s] / 3.0;
            czz[lag + max_lag] += z[utt][t] * z[utt][s] / 3.0;
          }
        }
      }
    }
    const double peak = *std::max_element(czz.begin(), czz.end());
    for (std::size_t i = 0; i < czr.size(); ++i) {
      CHECK(gc.czr[i] == doctest::Approx(czr[i] / peak).epsilon(1e-12));
      CHECK(gc.czz[i] == doctest::Approx(czz[i] / peak).epsilon(1e-12));
    }
  }

  SUBCASE("empty dataset is rejected") {
    CHECK_THROWS_AS(GateCorrelationFromSeries({}, {}, 3), ArgumentError);
  }
}

TEST_CASE("trained gru has a lag-zero gate correlation peak") {
  auto train = MakeSequenceDataset(24, 20, 40, 6, 4, 51);
  auto dev = MakeSequenceDataset(8, 20, 40, 6, 4, 52);

  Rng rng = MakeRng(53);
  RnnStackConfig cfg{6, {{CellKind::kGru, 32, false}}, 0.0};
  RnnClassifier model(cfg, 4, &rng);

  RnnTrainConfig tc = DefaultRnnTrainConfig();
  tc.max_epochs = 10;
  tc.seed = 54;
  TrainRnnClassifier(&model, train, dev, tc);

  auto gc = ComputeGateCorrelation(&model, dev, 12);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < gc.czr.size(); ++i) {
    if (gc.czr[i] > gc.czr[argmax]) argmax = i;
  }
  CHECK(static_cast<long>(argmax) - gc.max_lag == 0);
}

TEST_CASE("gradient norms: zero-loss regime and accumulate-then-norm oracle") {
  auto data = MakeSequenceDataset(4, 6, 10, 3, 3, 55);
  Rng rng = MakeRng(56);
  RnnStackConfig cfg{3, {{CellKind::kGru, 5, false}}, 0.0};
  RnnClassifier model(cfg, 3, &rng);

  SUBCASE("matches an independent accumulate-then-norm oracle") {
    auto norms = GradNormStats(&model, data);
    // oracle: redo the accumulation by hand for one named parameter
    ParamSet params = model.Params();
    const auto& view = params[0];  // rnn.l0.Wz
    double expect = 0.0;
    for (std::size_t utt = 0; utt < data.inputs.size(); ++utt) {
      model.ZeroGrad();
      Seq logp = model.Forward(data.inputs[utt], RunMode::kTrain, nullptr);
      Matrix flat(logp.size(), logp[0].cols());
      for (std::size_t t = 0; t < logp.size(); ++t) {
        for (std::size_t j = 0; j < logp[t].cols(); ++j) {
          flat(t, j) = logp[t](0, j);
        }
      }
      auto loss = NllLoss(flat, data.labels[utt]);
      Seq dlogp(logp.size());
      for (std::size_t t = 0; t < logp.size(); ++t) {
        dlogp[t] = Matrix(1, loss.grad.cols());
        for (std::size_t j = 0; j < loss.grad.cols(); ++j) {
          dlogp[t](0, j) = loss.grad(t, j);
        }
      }
      model.Backward(dlogp);
      double norm2 = 0.0;
      for (std::size_t k = 0; k < view.size; ++k) {
        norm2 += view.grad[k] * view.grad[k];
      }
      expect += std::sqrt(norm2);
    }
    expect /= static_cast<double>(data.inputs.size());
    CHECK(norms.at(view.name) == doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("labels equal to the argmax of a saturated model give zero norms") {
    // force the head to produce a one-hot-certain output independent of the stack
    // by zeroing all weights and pinning huge biases toward class 0
    auto params = model.Params();
    for (auto& p : params) {
      std::fill(p.value, p.value + p.size, 0.0);
    }
    std::fill(model.head().bias().begin(), model.head().bias().end(), -4000.0);
    model.head().bias()[0] = 4000.0;
    SequenceDataset zero_loss = data;
    for (auto& utt : zero_loss.labels) {
      std::fill(utt.begin(), utt.end(), 0);  // labels match the certain output
    }
    auto norms = GradNormStats(&model, zero_loss);
    for (const auto& [name, value] : norms) {
      CHECK(value == 0.0);
    }
  }
}

TEST_CASE("rnn training learns the synthetic frame task and is deterministic") {
  auto train = MakeSequenceDataset(20, 15, 30, 5, 3, 61);
  auto dev = MakeSequenceDataset(6, 15, 30, 5, 3, 62);

  auto run = [&]() {
    Rng rng = MakeRng(63);
    RnnStackConfig cfg{5, {{CellKind::kLiGru, 12, false}}, 0.0};
    RnnClassifier model(cfg, 3, &rng);
    RnnTrainConfig tc = DefaultRnnTrainConfig();
    tc.optimizer.lr = 0.05;  // the toy task is tiny, larger steps converge fast
    tc.max_epochs = 15;
    tc.seed = 64;
    auto log = TrainRnnClassifier(&model, train, dev, tc);
    return std::make_pair(log, EvaluateRnnClassifier(&model, dev));
  };
  auto [log1, acc1] = run();
  auto [log2, acc2] = run();
  CHECK(acc1 == acc2);
  REQUIRE(log1.epochs.size() == log2.epochs.size());
  for (std::size_t i = 0; i < log1.epochs.size(); ++i) {
    CHECK(log1.epochs[i].train_loss == log2.epochs[i].train_loss);
    CHECK(log1.epochs[i].dev_metric == log2.epochs[i].dev_metric);
  }
  CHECK(acc1 > 0.7);  // the toy task is separable
}
