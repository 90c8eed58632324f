// src/rnn.cc

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

#include "dsr/rnn.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsr/init.h"

namespace dsr {

namespace {

constexpr double kStateClamp = 1e6;

Matrix Sigmoid(const Matrix& a) {
  return ActivationForward(Activation::kSigmoid, a);
}

Matrix TanhM(const Matrix& a) { return ActivationForward(Activation::kTanh, a); }

Matrix ReluM(const Matrix& a) { return ActivationForward(Activation::kRelu, a); }

void CheckSeq(const Seq& x, const char* what) {
  if (x.empty()) throw ArgumentError(std::string(what) + ": empty sequence");
  for (const auto& m : x) {
    if (m.rows() != x[0].rows() || m.cols() != x[0].cols()) {
      throw ArgumentError(std::string(what) + ": ragged sequence");
    }
  }
}

Seq ReverseSeq(const Seq& x) { return Seq(x.rbegin(), x.rend()); }

std::unique_ptr<RecurrentCell> MakeCell(CellKind kind, std::size_t in,
                                        std::size_t hidden, Rng* rng) {
  switch (kind) {
    case CellKind::kVanillaRelu:
      return std::make_unique<VanillaReluCell>(in, hidden, rng);
    case CellKind::kGru:
      return std::make_unique<GruCell>(in, hidden, rng);
    case CellKind::kMGru:
      return std::make_unique<MGruCell>(in, hidden, rng);
    case CellKind::kLiGru:
      return std::make_unique<LiGruCell>(in, hidden, rng);
  }
  throw ArgumentError("MakeCell: unknown cell kind");
}

// Glorot for feed-forward blocks, orthogonal for recurrent blocks.
void InitFeedForward(Matrix* w, Rng* rng) { InitGlorot(w, rng); }
void InitRecurrent(Matrix* u, Rng* rng) { InitOrthogonal(u, rng); }

}  // namespace

// ---------------------------------------------------------------------------
// VanillaReluCell

VanillaReluCell::VanillaReluCell(std::size_t in_dim, std::size_t hidden,
                                 Rng* rng)
    : w_(hidden, in_dim),
      u_(hidden, hidden),
      b_(hidden, 0.0),
      gw_(hidden, in_dim),
      gu_(hidden, hidden),
      gb_(hidden, 0.0) {
  InitFeedForward(&w_, rng);
  InitRecurrent(&u_, rng);
}

Seq VanillaReluCell::Forward(const Seq& x, RunMode) {
  CheckSeq(x, "VanillaReluCell");
  const std::size_t t_len = x.size();
  const std::size_t batch = x[0].rows();
  x_ = x;
  h_.assign(t_len, Matrix());
  Matrix h_prev(batch, out_dim());
  for (std::size_t t = 0; t < t_len; ++t) {
    Matrix a = AffineForward(x[t], w_, b_);
    a += MatMulNT(h_prev, u_);
    h_[t] = ReluM(a);
    h_prev = h_[t];
  }
  return h_;
}

Seq VanillaReluCell::Backward(const Seq& dh) {
  const std::size_t t_len = h_.size();
  const std::size_t batch = h_[0].rows();
  Seq dx(t_len);
  Matrix carry(batch, out_dim());
  const Matrix zero_state(batch, out_dim());
  for (std::size_t t = t_len; t-- > 0;) {
    Matrix total = dh[t];
    total += carry;
    Matrix da = ActivationBackward(Activation::kRelu, h_[t], total);
    const Matrix& h_prev = t > 0 ? h_[t - 1] : zero_state;
    gw_ += MatMulTN(da, x_[t]);
    gu_ += MatMulTN(da, h_prev);
    const auto col = ColumnSums(da);
    for (std::size_t j = 0; j < gb_.size(); ++j) gb_[j] += col[j];
    dx[t] = MatMul(da, w_);
    carry = MatMul(da, u_);
  }
  dh0_ = carry;
  return dx;
}

void VanillaReluCell::ZeroGrad() {
  gw_.setZero();
  gu_.setZero();
  std::fill(gb_.begin(), gb_.end(), 0.0);
}

void VanillaReluCell::CollectParams(const std::string& prefix, ParamSet* out) {
  out->push_back({prefix + ".W", w_.data(), gw_.data(), w_.size()});
  out->push_back({prefix + ".U", u_.data(), gu_.data(), u_.size()});
  out->push_back({prefix + ".b", b_.data(), gb_.data(), b_.size()});
}

ParamCounts VanillaReluCell::CountParams() const {
  return {w_.size() + u_.size(), b_.size(), 0};
}

std::unique_ptr<RecurrentCell> VanillaReluCell::Clone() const {
  auto copy = std::make_unique<VanillaReluCell>(*this);
  return copy;
}

// ---------------------------------------------------------------------------
// GruCell

GruCell::GruCell(std::size_t in_dim, std::size_t hidden, Rng* rng)
    : wz_(hidden, in_dim),
      wr_(hidden, in_dim),
      wh_(hidden, in_dim),
      uz_(hidden, hidden),
      ur_(hidden, hidden),
      uh_(hidden, hidden),
      bz_(hidden, 0.0),
      br_(hidden, 0.0),
      bh_(hidden, 0.0),
      gwz_(hidden, in_dim),
      gwr_(hidden, in_dim),
      gwh_(hidden, in_dim),
      guz_(hidden, hidden),
      gur_(hidden, hidden),
      guh_(hidden, hidden),
      gbz_(hidden, 0.0),
      gbr_(hidden, 0.0),
      gbh_(hidden, 0.0) {
  InitFeedForward(&wz_, rng);
  InitFeedForward(&wr_, rng);
  InitFeedForward(&wh_, rng);
  InitRecurrent(&uz_, rng);
  InitRecurrent(&ur_, rng);
  InitRecurrent(&uh_, rng);
}

Seq GruCell::Forward(const Seq& x, RunMode) {
  CheckSeq(x, "GruCell");
  const std::size_t t_len = x.size();
  const std::size_t batch = x[0].rows();
  x_ = x;
  h_.assign(t_len, Matrix());
  z_.assign(t_len, Matrix());
  r_.assign(t_len, Matrix());
  hc_.assign(t_len, Matrix());
  hr_.assign(t_len, Matrix());
  Matrix h_prev(batch, out_dim());
  for (std::size_t t = 0; t < t_len; ++t) {
    Matrix az = AffineForward(x[t], wz_, bz_);
    az += MatMulNT(h_prev, uz_);
    z_[t] = Sigmoid(az);

    Matrix ar = AffineForward(x[t], wr_, br_);
    ar += MatMulNT(h_prev, ur_);
    r_[t] = Sigmoid(ar);

    hr_[t] = Hadamard(h_prev, r_[t]);
    Matrix ah = AffineForward(x[t], wh_, bh_);
    ah += MatMulNT(hr_[t], uh_);
    hc_[t] = TanhM(ah);

    Matrix h = Hadamard(z_[t], h_prev);
    Matrix blend = hc_[t];
    for (std::size_t i = 0; i < blend.size(); ++i) {
      blend.values()[i] *= 1.0 - z_[t].values()[i];
    }
    h += blend;
    h_[t] = std::move(h);
    h_prev = h_[t];
  }
  return h_;
}

Seq GruCell::Backward(const Seq& dh) {
  const std::size_t t_len = h_.size();
  const std::size_t batch = h_[0].rows();
  Seq dx(t_len);
  Matrix carry(batch, out_dim());
  const Matrix zero_state(batch, out_dim());
  for (std::size_t t = t_len; t-- > 0;) {
    const Matrix& h_prev = t > 0 ? h_[t - 1] : zero_state;
    Matrix total = dh[t];
    total += carry;

    // h = z . h_prev + (1-z) . hc
    Matrix dz(batch, out_dim());
    Matrix dhc(batch, out_dim());
    carry = Matrix(batch, out_dim());
    for (std::size_t i = 0; i < total.size(); ++i) {
      const double g = total.values()[i];
      const double z = z_[t].values()[i];
      dz.values()[i] = g * (h_prev.values()[i] - hc_[t].values()[i]);
      dhc.values()[i] = g * (1.0 - z);
      carry.values()[i] = g * z;
    }

    // candidate path
    Matrix dah = ActivationBackward(Activation::kTanh, hc_[t], dhc);
    gwh_ += MatMulTN(dah, x_[t]);
    guh_ += MatMulTN(dah, hr_[t]);
    {
      const auto col = ColumnSums(dah);
      for (std::size_t j = 0; j < gbh_.size(); ++j) gbh_[j] += col[j];
    }
    Matrix dhr = MatMul(dah, uh_);
    Matrix dr(batch, out_dim());
    for (std::size_t i = 0; i < dhr.size(); ++i) {
      carry.values()[i] += dhr.values()[i] * r_[t].values()[i];
      dr.values()[i] = dhr.values()[i] * h_prev.values()[i];
    }

    // reset gate path
    Matrix dar = ActivationBackward(Activation::kSigmoid, r_[t], dr);
    gwr_ += MatMulTN(dar, x_[t]);
    gur_ += MatMulTN(dar, h_prev);
    {
      const auto col = ColumnSums(dar);
      for (std::size_t j = 0; j < gbr_.size(); ++j) gbr_[j] += col[j];
    }
    carry += MatMul(dar, ur_);

    // update gate path
    Matrix daz = ActivationBackward(Activation::kSigmoid, z_[t], dz);
    gwz_ += MatMulTN(daz, x_[t]);
    guz_ += MatMulTN(daz, h_prev);
    {
      const auto col = ColumnSums(daz);
      for (std::size_t j = 0; j < gbz_.size(); ++j) gbz_[j] += col[j];
    }
    carry += MatMul(daz, uz_);

    dx[t] = MatMul(daz, wz_);
    dx[t] += MatMul(dar, wr_);
    dx[t] += MatMul(dah, wh_);
  }
  dh0_ = carry;
  return dx;
}

void GruCell::ZeroGrad() {
  gwz_.setZero();
  gwr_.setZero();
  gwh_.setZero();
  guz_.setZero();
  gur_.setZero();
  guh_.setZero();
  std::fill(gbz_.begin(), gbz_.end(), 0.0);
  std::fill(gbr_.begin(), gbr_.end(), 0.0);
  std::fill(gbh_.begin(), gbh_.end(), 0.0);
}

void GruCell::CollectParams(const std::string& prefix, ParamSet* out) {
  out->push_back({prefix + ".Wz", wz_.data(), gwz_.data(), wz_.size()});
  out->push_back({prefix + ".Wr", wr_.data(), gwr_.data(), wr_.size()});
  out->push_back({prefix + ".Wh", wh_.data(), gwh_.data(), wh_.size()});
  out->push_back({prefix + ".Uz", uz_.data(), guz_.data(), uz_.size()});
  out->push_back({prefix + ".Ur", ur_.data(), gur_.data(), ur_.size()});
  out->push_back({prefix + ".Uh", uh_.data(), guh_.data(), uh_.size()});
  out->push_back({prefix + ".bz", bz_.data(), gbz_.data(), bz_.size()});
  out->push_back({prefix + ".br", br_.data(), gbr_.data(), br_.size()});
  out->push_back({prefix + ".bh", bh_.data(), gbh_.data(), bh_.size()});
}

ParamCounts GruCell::CountParams() const {
  return {wz_.size() + wr_.size() + wh_.size() + uz_.size() + ur_.size() +
              uh_.size(),
          bz_.size() + br_.size() + bh_.size(), 0};
}

std::unique_ptr<RecurrentCell> GruCell::Clone() const {
  return std::make_unique<GruCell>(*this);
}

// ---------------------------------------------------------------------------
// MGruCell

MGruCell::MGruCell(std::size_t in_dim, std::size_t hidden, Rng* rng)
    : wz_(hidden, in_dim),
      wh_(hidden, in_dim),
      uz_(hidden, hidden),
      uh_(hidden, hidden),
      bz_(hidden, 0.0),
      bh_(hidden, 0.0),
      gwz_(hidden, in_dim),
      gwh_(hidden, in_dim),
      guz_(hidden, hidden),
      guh_(hidden, hidden),
      gbz_(hidden, 0.0),
      gbh_(hidden, 0.0) {
  InitFeedForward(&wz_, rng);
  InitFeedForward(&wh_, rng);
  InitRecurrent(&uz_, rng);
  InitRecurrent(&uh_, rng);
}

Seq MGruCell::Forward(const Seq& x, RunMode) {
  CheckSeq(x, "MGruCell");
  const std::size_t t_len = x.size();
  const std::size_t batch = x[0].rows();
  x_ = x;
  h_.assign(t_len, Matrix());
  z_.assign(t_len, Matrix());
  hc_.assign(t_len, Matrix());
  Matrix h_prev(batch, out_dim());
  for (std::size_t t = 0; t < t_len; ++t) {
    Matrix az = AffineForward(x[t], wz_, bz_);
    az += MatMulNT(h_prev, uz_);
    z_[t] = Sigmoid(az);

    Matrix ah = AffineForward(x[t], wh_, bh_);
    ah += MatMulNT(h_prev, uh_);
    hc_[t] = TanhM(ah);

    Matrix h = Hadamard(z_[t], h_prev);
    Matrix blend = hc_[t];
    for (std::size_t i = 0; i < blend.size(); ++i) {
      blend.values()[i] *= 1.0 - z_[t].values()[i];
    }
    h += blend;
    h_[t] = std::move(h);
    h_prev = h_[t];
  }
  return h_;
}

Seq MGruCell::Backward(const Seq& dh) {
  const std::size_t t_len = h_.size();
  const std::size_t batch = h_[0].rows();
  Seq dx(t_len);
  Matrix carry(batch, out_dim());
  const Matrix zero_state(batch, out_dim());
  for (std::size_t t = t_len; t-- > 0;) {
    const Matrix& h_prev = t > 0 ? h_[t - 1] : zero_state;
    Matrix total = dh[t];
    total += carry;

    Matrix dz(batch, out_dim());
    Matrix dhc(batch, out_dim());
    carry = Matrix(batch, out_dim());
    for (std::size_t i = 0; i < total.size(); ++i) {
      const double g = total.values()[i];
      const double z = z_[t].values()[i];
      dz.values()[i] = g * (h_prev.values()[i] - hc_[t].values()[i]);
      dhc.values()[i] = g * (1.0 - z);
      carry.values()[i] = g * z;
    }

    Matrix dah = ActivationBackward(Activation::kTanh, hc_[t], dhc);
    gwh_ += MatMulTN(dah, x_[t]);
    guh_ += MatMulTN(dah, h_prev);
    {
      const auto col = ColumnSums(dah);
      for (std::size_t j = 0; j < gbh_.size(); ++j) gbh_[j] += col[j];
    }
    carry += MatMul(dah, uh_);

    Matrix daz = ActivationBackward(Activation::kSigmoid, z_[t], dz);
    gwz_ += MatMulTN(daz, x_[t]);
    guz_ += MatMulTN(daz, h_prev);
    {
      const auto col = ColumnSums(daz);
      for (std::size_t j = 0; j < gbz_.size(); ++j) gbz_[j] += col[j];
    }
    carry += MatMul(daz, uz_);

    dx[t] = MatMul(daz, wz_);
    dx[t] += MatMul(dah, wh_);
  }
  dh0_ = carry;
  return dx;
}

void MGruCell::ZeroGrad() {
  gwz_.setZero();
  gwh_.setZero();
  guz_.setZero();
  guh_.setZero();
  std::fill(gbz_.begin(), gbz_.end(), 0.0);
  std::fill(gbh_.begin(), gbh_.end(), 0.0);
}

void MGruCell::CollectParams(const std::string& prefix, ParamSet* out) {
  out->push_back({prefix + ".Wz", wz_.data(), gwz_.data(), wz_.size()});
  out->push_back({prefix + ".Wh", wh_.data(), gwh_.data(), wh_.size()});
  out->push_back({prefix + ".Uz", uz_.data(), guz_.data(), uz_.size()});
  out->push_back({prefix + ".Uh", uh_.data(), guh_.data(), uh_.size()});
  out->push_back({prefix + ".bz", bz_.data(), gbz_.data(), bz_.size()});
  out->push_back({prefix + ".bh", bh_.data(), gbh_.data(), bh_.size()});
}

ParamCounts MGruCell::CountParams() const {
  return {wz_.size() + wh_.size() + uz_.size() + uh_.size(),
          bz_.size() + bh_.size(), 0};
}

std::unique_ptr<RecurrentCell> MGruCell::Clone() const {
  return std::make_unique<MGruCell>(*this);
}

// ---------------------------------------------------------------------------
// LiGruCell

LiGruCell::LiGruCell(std::size_t in_dim, std::size_t hidden, Rng* rng)
    : wz_(hidden, in_dim),
      wh_(hidden, in_dim),
      uz_(hidden, hidden),
      uh_(hidden, hidden),
      bn_z_(hidden),
      bn_h_(hidden),
      gwz_(hidden, in_dim),
      gwh_(hidden, in_dim),
      guz_(hidden, hidden),
      guh_(hidden, hidden) {
  InitFeedForward(&wz_, rng);
  InitFeedForward(&wh_, rng);
  InitRecurrent(&uz_, rng);
  InitRecurrent(&uh_, rng);
}

Seq LiGruCell::Forward(const Seq& x, RunMode mode) {
  CheckSeq(x, "LiGruCell");
  const std::size_t t_len = x.size();
  const std::size_t batch = x[0].rows();
  const std::size_t hidden = out_dim();
  x_ = x;

  // precompute W x for the whole sequence, normalize over batch x time
  Matrix flat_z(t_len * batch, hidden);
  Matrix flat_h(t_len * batch, hidden);
  for (std::size_t t = 0; t < t_len; ++t) {
    const Matrix pz = MatMulNT(x[t], wz_);
    const Matrix ph = MatMulNT(x[t], wh_);
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < hidden; ++j) {
        flat_z(t * batch + i, j) = pz(i, j);
        flat_h(t * batch + i, j) = ph(i, j);
      }
    }
  }
  const bool train = mode == RunMode::kTrain;
  const Matrix qz = bn_z_.Forward(flat_z, train);
  const Matrix qh = bn_h_.Forward(flat_h, train);

  h_.assign(t_len, Matrix());
  z_.assign(t_len, Matrix());
  hc_.assign(t_len, Matrix());
  clamped_.assign(t_len, 0);
  clamp_mask_.assign(t_len, Matrix());
  clamp_count_ = 0;

  Matrix h_prev(batch, hidden);
  for (std::size_t t = 0; t < t_len; ++t) {
    Matrix az(batch, hidden);
    Matrix ah(batch, hidden);
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < hidden; ++j) {
        az(i, j) = qz(t * batch + i, j);
        ah(i, j) = qh(t * batch + i, j);
      }
    }
    az += MatMulNT(h_prev, uz_);
    ah += MatMulNT(h_prev, uh_);
    z_[t] = Sigmoid(az);
    hc_[t] = ReluM(ah);

    Matrix h = Hadamard(z_[t], h_prev);
    Matrix blend = hc_[t];
    for (std::size_t i = 0; i < blend.size(); ++i) {
      blend.values()[i] *= 1.0 - z_[t].values()[i];
    }
    h += blend;

    for (std::size_t i = 0; i < h.size(); ++i) {
      if (std::abs(h.values()[i]) > kStateClamp) {
        if (!clamped_[t]) {
          clamp_mask_[t] = Matrix(batch, hidden, 1.0);
          clamped_[t] = 1;
        }
        h.values()[i] = h.values()[i] > 0.0 ? kStateClamp : -kStateClamp;
        clamp_mask_[t].values()[i] = 0.0;
        ++clamp_count_;
      }
    }
    h_[t] = std::move(h);
    h_prev = h_[t];
  }
  return h_;
}

Seq LiGruCell::Backward(const Seq& dh) {
  const std::size_t t_len = h_.size();
  const std::size_t batch = h_[0].rows();
  const std::size_t hidden = out_dim();
  Seq dx(t_len);
  Matrix carry(batch, hidden);
  const Matrix zero_state(batch, hidden);
  Matrix dflat_z(t_len * batch, hidden);
  Matrix dflat_h(t_len * batch, hidden);

  for (std::size_t t = t_len; t-- > 0;) {
    const Matrix& h_prev = t > 0 ? h_[t - 1] : zero_state;
    Matrix total = dh[t];
    total += carry;
    if (clamped_[t]) total = Hadamard(total, clamp_mask_[t]);

    Matrix dz(batch, hidden);
    Matrix dhc(batch, hidden);
    carry = Matrix(batch, hidden);
    for (std::size_t i = 0; i < total.size(); ++i) {
      const double g = total.values()[i];
      const double z = z_[t].values()[i];
      dz.values()[i] = g * (h_prev.values()[i] - hc_[t].values()[i]);
      dhc.values()[i] = g * (1.0 - z);
      carry.values()[i] = g * z;
    }

    Matrix dah = ActivationBackward(Activation::kRelu, hc_[t], dhc);
    guh_ += MatMulTN(dah, h_prev);
    carry += MatMul(dah, uh_);

    Matrix daz = ActivationBackward(Activation::kSigmoid, z_[t], dz);
    guz_ += MatMulTN(daz, h_prev);
    carry += MatMul(daz, uz_);

    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < hidden; ++j) {
        dflat_z(t * batch + i, j) = daz(i, j);
        dflat_h(t * batch + i, j) = dah(i, j);
      }
    }
  }
  dh0_ = carry;

  const Matrix dpz = bn_z_.Backward(dflat_z);
  const Matrix dph = bn_h_.Backward(dflat_h);
  for (std::size_t t = 0; t < t_len; ++t) {
    Matrix dpz_t(batch, wz_.rows());
    Matrix dph_t(batch, wh_.rows());
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < hidden; ++j) {
        dpz_t(i, j) = dpz(t * batch + i, j);
        dph_t(i, j) = dph(t * batch + i, j);
      }
    }
    gwz_ += MatMulTN(dpz_t, x_[t]);
    gwh_ += MatMulTN(dph_t, x_[t]);
    dx[t] = MatMul(dpz_t, wz_);
    dx[t] += MatMul(dph_t, wh_);
  }
  return dx;
}

void LiGruCell::ZeroGrad() {
  gwz_.setZero();
  gwh_.setZero();
  guz_.setZero();
  guh_.setZero();
  bn_z_.ZeroGrad();
  bn_h_.ZeroGrad();
}

void LiGruCell::CollectParams(const std::string& prefix, ParamSet* out) {
  out->push_back({prefix + ".Wz", wz_.data(), gwz_.data(), wz_.size()});
  out->push_back({prefix + ".Wh", wh_.data(), gwh_.data(), wh_.size()});
  out->push_back({prefix + ".Uz", uz_.data(), guz_.data(), uz_.size()});
  out->push_back({prefix + ".Uh", uh_.data(), guh_.data(), uh_.size()});
  bn_z_.CollectParams(prefix + ".bn_z", out);
  bn_h_.CollectParams(prefix + ".bn_h", out);
}

ParamCounts LiGruCell::CountParams() const {
  return {wz_.size() + wh_.size() + uz_.size() + uh_.size(), 0,
          4 * out_dim()};
}

std::unique_ptr<RecurrentCell> LiGruCell::Clone() const {
  return std::make_unique<LiGruCell>(*this);
}

// ---------------------------------------------------------------------------
// BidirectionalCell

BidirectionalCell::BidirectionalCell(std::unique_ptr<RecurrentCell> forward,
                                     std::unique_ptr<RecurrentCell> backward)
    : fwd_(std::move(forward)), bwd_(std::move(backward)) {
  if (fwd_->in_dim() != bwd_->in_dim()) {
    throw ArgumentError("BidirectionalCell: direction input dims differ");
  }
}

Seq BidirectionalCell::Forward(const Seq& x, RunMode mode) {
  CheckSeq(x, "BidirectionalCell");
  const Seq f = fwd_->Forward(x, mode);
  const Seq b = bwd_->Forward(ReverseSeq(x), mode);
  const std::size_t t_len = x.size();
  Seq out(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    out[t] = ConcatCols(f[t], b[t_len - 1 - t]);
  }
  return out;
}

Seq BidirectionalCell::Backward(const Seq& dh) {
  const std::size_t t_len = dh.size();
  const std::size_t hf = fwd_->out_dim();
  const std::size_t hb = bwd_->out_dim();
  Seq df(t_len), db(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    df[t] = SliceCols(dh[t], 0, hf);
    db[t] = SliceCols(dh[t_len - 1 - t], hf, hb);
  }
  Seq dxf = fwd_->Backward(df);
  Seq dxb = bwd_->Backward(db);  // in reversed time
  Seq dx(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    dx[t] = dxf[t];
    dx[t] += dxb[t_len - 1 - t];
  }
  dh0_ = fwd_->initial_state_grad();
  return dx;
}

void BidirectionalCell::ZeroGrad() {
  fwd_->ZeroGrad();
  bwd_->ZeroGrad();
}

void BidirectionalCell::CollectParams(const std::string& prefix,
                                      ParamSet* out) {
  fwd_->CollectParams(prefix + ".fwd", out);
  bwd_->CollectParams(prefix + ".bwd", out);
}

ParamCounts BidirectionalCell::CountParams() const {
  const ParamCounts f = fwd_->CountParams();
  const ParamCounts b = bwd_->CountParams();
  return {f.weights + b.weights, f.biases + b.biases, f.bn + b.bn};
}

std::unique_ptr<RecurrentCell> BidirectionalCell::Clone() const {
  return std::make_unique<BidirectionalCell>(fwd_->Clone(), bwd_->Clone());
}

// ---------------------------------------------------------------------------
// step functions

GruStepResult GruStep(const GruCell& cell, const Matrix& x_t,
                      const Matrix& h_prev) {
  GruStepResult out;
  Matrix az = AffineForward(x_t, cell.wz_, cell.bz_);
  az += MatMulNT(h_prev, cell.uz_);
  out.z = Sigmoid(az);

  Matrix ar = AffineForward(x_t, cell.wr_, cell.br_);
  ar += MatMulNT(h_prev, cell.ur_);
  out.r = Sigmoid(ar);

  Matrix ah = AffineForward(x_t, cell.wh_, cell.bh_);
  ah += MatMulNT(Hadamard(h_prev, out.r), cell.uh_);
  out.candidate = TanhM(ah);

  out.h = Hadamard(out.z, h_prev);
  Matrix blend = out.candidate;
  for (std::size_t i = 0; i < blend.size(); ++i) {
    blend.values()[i] *= 1.0 - out.z.values()[i];
  }
  out.h += blend;
  return out;
}

MGruStepResult MGruStep(const MGruCell& cell, const Matrix& x_t,
                        const Matrix& h_prev) {
  MGruStepResult out;
  Matrix az = AffineForward(x_t, cell.wz_, cell.bz_);
  az += MatMulNT(h_prev, cell.uz_);
  out.z = Sigmoid(az);

  Matrix ah = AffineForward(x_t, cell.wh_, cell.bh_);
  ah += MatMulNT(h_prev, cell.uh_);
  out.candidate = TanhM(ah);

  out.h = Hadamard(out.z, h_prev);
  Matrix blend = out.candidate;
  for (std::size_t i = 0; i < blend.size(); ++i) {
    blend.values()[i] *= 1.0 - out.z.values()[i];
  }
  out.h += blend;
  return out;
}

LiGruStepResult LiGruStep(LiGruCell* cell, const Matrix& x_t,
                          const Matrix& h_prev, bool bn_train) {
  LiGruStepResult out;
  Matrix az = cell->bn_z_.Forward(MatMulNT(x_t, cell->wz_), bn_train);
  az += MatMulNT(h_prev, cell->uz_);
  out.z = Sigmoid(az);

  Matrix ah = cell->bn_h_.Forward(MatMulNT(x_t, cell->wh_), bn_train);
  ah += MatMulNT(h_prev, cell->uh_);
  out.candidate = ReluM(ah);

  out.h = Hadamard(out.z, h_prev);
  Matrix blend = out.candidate;
  for (std::size_t i = 0; i < blend.size(); ++i) {
    blend.values()[i] *= 1.0 - out.z.values()[i];
  }
  out.h += blend;
  return out;
}

// ---------------------------------------------------------------------------
// RnnStack

RnnStack::RnnStack(const RnnStackConfig& config, Rng* rng) : config_(config) {
  if (config.layers.empty()) {
    throw ArgumentError("RnnStack: need at least one layer");
  }
  std::size_t in = config.in_dim;
  for (const auto& spec : config.layers) {
    std::unique_ptr<RecurrentCell> cell;
    if (spec.bidirectional) {
      cell = std::make_unique<BidirectionalCell>(
          MakeCell(spec.kind, in, spec.hidden, rng),
          MakeCell(spec.kind, in, spec.hidden, rng));
    } else {
      cell = MakeCell(spec.kind, in, spec.hidden, rng);
    }
    in = cell->out_dim();
    cells_.push_back(std::move(cell));
    drops_.emplace_back(config.dropout);
  }
}

RnnStack::RnnStack(const RnnStack& other) : config_(other.config_) {
  for (const auto& c : other.cells_) cells_.push_back(c->Clone());
  drops_ = other.drops_;
}

RnnStack& RnnStack::operator=(const RnnStack& other) {
  if (this == &other) return *this;
  config_ = other.config_;
  cells_.clear();
  for (const auto& c : other.cells_) cells_.push_back(c->Clone());
  drops_ = other.drops_;
  masks_.clear();
  drop_in_.clear();
  return *this;
}

Seq RnnStack::Forward(const Seq& x, RunMode mode, Rng* rng) {
  CheckSeq(x, "RnnStack");
  masks_.assign(cells_.size(), Matrix());
  Seq h = x;
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    h = cells_[l]->Forward(h, mode);
    if (config_.dropout > 0.0 && mode == RunMode::kTrain) {
      if (rng == nullptr) {
        throw ArgumentError("RnnStack: dropout requires an RNG in train mode");
      }
      // one mask per layer, shared across every time step of the sequence
      masks_[l] = drops_[l].SampleMask(h[0].rows(), h[0].cols(), rng);
      for (auto& step : h) step = Hadamard(step, masks_[l]);
    }
  }
  return h;
}

Seq RnnStack::Backward(const Seq& dh) {
  Seq d = dh;
  for (std::size_t l = cells_.size(); l-- > 0;) {
    if (!masks_[l].empty()) {
      for (auto& step : d) step = Hadamard(step, masks_[l]);
    }
    d = cells_[l]->Backward(d);
  }
  return d;
}

void RnnStack::ZeroGrad() {
  for (auto& c : cells_) c->ZeroGrad();
}

void RnnStack::CollectParams(const std::string& prefix, ParamSet* out) {
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    cells_[l]->CollectParams(prefix + ".l" + std::to_string(l), out);
  }
}

ParamCounts RnnStack::CountParams() const {
  ParamCounts total;
  for (const auto& c : cells_) {
    const ParamCounts pc = c->CountParams();
    total.weights += pc.weights;
    total.biases += pc.biases;
    total.bn += pc.bn;
  }
  return total;
}

std::size_t RnnStack::out_dim() const { return cells_.back()->out_dim(); }

Seq RunSequence(RnnStack* stack, const Seq& inputs, RunMode mode, Rng* rng) {
  return stack->Forward(inputs, mode, rng);
}

// ---------------------------------------------------------------------------
// RnnClassifier

RnnClassifier::RnnClassifier(const RnnStackConfig& stack_config,
                             std::size_t n_classes, Rng* rng)
    : stack_(stack_config, rng),
      head_(stack_.out_dim(), n_classes, Activation::kLogSoftmax) {
  InitGlorot(&head_.weights(), rng);
}

Seq RnnClassifier::Forward(const Seq& x, RunMode mode, Rng* rng) {
  const Seq h = stack_.Forward(x, mode, rng);
  const std::size_t t_len = h.size();
  const std::size_t batch = h[0].rows();
  Matrix flat(t_len * batch, h[0].cols());
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < h[t].cols(); ++j) {
        flat(t * batch + i, j) = h[t](i, j);
      }
    }
  }
  const Matrix logp = head_.Forward(flat);
  Seq out(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    out[t] = Matrix(batch, logp.cols());
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < logp.cols(); ++j) {
        out[t](i, j) = logp(t * batch + i, j);
      }
    }
  }
  head_in_ = h;
  return out;
}

void RnnClassifier::Backward(const Seq& dlogp) {
  const std::size_t t_len = dlogp.size();
  const std::size_t batch = dlogp[0].rows();
  Matrix flat(t_len * batch, dlogp[0].cols());
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < dlogp[t].cols(); ++j) {
        flat(t * batch + i, j) = dlogp[t](i, j);
      }
    }
  }
  const Matrix dflat = head_.Backward(flat);
  Seq dh(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    dh[t] = Matrix(batch, dflat.cols());
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < dflat.cols(); ++j) {
        dh[t](i, j) = dflat(t * batch + i, j);
      }
    }
  }
  stack_.Backward(dh);
}

void RnnClassifier::ZeroGrad() {
  stack_.ZeroGrad();
  head_.ZeroGrad();
}

ParamSet RnnClassifier::Params() {
  ParamSet out;
  stack_.CollectParams("rnn", &out);
  head_.CollectParams("rnn.head", &out);
  return out;
}

RnnTrainConfig DefaultRnnTrainConfig() {
  RnnTrainConfig c;
  c.optimizer.kind = OptimizerKind::kAdam;
  c.optimizer.lr = 0.0013;
  c.schedule.improve_threshold = 0.001;
  c.schedule.stop_threshold = -1e300;  // run all epochs, halving only
  c.max_epochs = 22;
  c.batch_sentences = 8;
  c.sort_ascending = true;
  return c;
}

namespace {

LossGrad UtteranceLoss(const Seq& logp, const std::vector<int>& labels,
                       Matrix* flat_logp) {
  const std::size_t t_len = logp.size();
  Matrix flat(t_len, logp[0].cols());
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t j = 0; j < logp[t].cols(); ++j) {
      flat(t, j) = logp[t](0, j);
    }
  }
  if (flat_logp != nullptr) *flat_logp = flat;
  return NllLoss(flat, labels);
}

}  // namespace

TrainResult TrainRnnClassifier(RnnClassifier* model,
                               const SequenceDataset& train,
                               const SequenceDataset& dev,
                               const RnnTrainConfig& config) {
  if (train.inputs.empty()) throw ArgumentError("TrainRnnClassifier: empty");
  Rng rng = MakeRng(config.seed);
  Optimizer opt(config.optimizer);
  LrSchedule schedule = config.schedule;
  ParamSet params = model->Params();

  std::vector<std::size_t> order(train.inputs.size());
  std::iota(order.begin(), order.end(), 0);
  if (config.sort_ascending) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return train.inputs[a].size() < train.inputs[b].size();
                     });
  }

  TrainResult result;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    double train_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_sentences) {
      const std::size_t n =
          std::min(config.batch_sentences, order.size() - start);
      model->ZeroGrad();
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t utt = order[start + i];
        Seq logp = model->Forward(train.inputs[utt], RunMode::kTrain, &rng);
        LossGrad loss = UtteranceLoss(logp, train.labels[utt], nullptr);
        batch_loss += loss.value;
        // spread the flat gradient back over the per-step sequence
        Seq dlogp(logp.size());
        for (std::size_t t = 0; t < logp.size(); ++t) {
          dlogp[t] = Matrix(1, loss.grad.cols());
          for (std::size_t j = 0; j < loss.grad.cols(); ++j) {
            dlogp[t](0, j) = loss.grad(t, j) / static_cast<double>(n);
          }
        }
        model->Backward(dlogp);
      }
      if (config.grad_clip > 0.0) {
        double norm2 = 0.0;
        for (const auto& p : params) {
          for (std::size_t k = 0; k < p.size; ++k) {
            norm2 += p.grad[k] * p.grad[k];
          }
        }
        const double norm = std::sqrt(norm2);
        if (norm > config.grad_clip) {
          const double scale = config.grad_clip / norm;
          for (const auto& p : params) {
            for (std::size_t k = 0; k < p.size; ++k) p.grad[k] *= scale;
          }
        }
      }
      opt.Step(params);
      train_loss += batch_loss / static_cast<double>(n);
      ++batches;
    }

    // dev pass
    double dev_loss = 0.0;
    std::size_t dev_correct = 0, dev_frames = 0;
    for (std::size_t utt = 0; utt < dev.inputs.size(); ++utt) {
      Seq logp = model->Forward(dev.inputs[utt], RunMode::kInference, nullptr);
      Matrix flat;
      dev_loss += UtteranceLoss(logp, dev.labels[utt], &flat).value;
      dev_correct += static_cast<std::size_t>(
          FrameAccuracy(flat, dev.labels[utt]) *
          static_cast<double>(dev.labels[utt].size()) +
          0.5);
      dev_frames += dev.labels[utt].size();
    }
    const double dev_metric =
        dev_frames > 0
            ? static_cast<double>(dev_correct) / static_cast<double>(dev_frames)
            : 0.0;

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = train_loss / static_cast<double>(batches);
    log.dev_loss = dev_loss / static_cast<double>(dev.inputs.size());
    log.dev_metric = dev_metric;
    log.lr = opt.lr();
    const LrSchedule::Action action = schedule.Update(dev_metric);
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

double EvaluateRnnClassifier(RnnClassifier* model,
                             const SequenceDataset& data) {
  std::size_t correct = 0, frames = 0;
  for (std::size_t utt = 0; utt < data.inputs.size(); ++utt) {
    Seq logp = model->Forward(data.inputs[utt], RunMode::kInference, nullptr);
    for (std::size_t t = 0; t < logp.size(); ++t) {
      std::size_t argmax = 0;
      for (std::size_t j = 1; j < logp[t].cols(); ++j) {
        if (logp[t](0, j) > logp[t](0, argmax)) argmax = j;
      }
      correct += static_cast<int>(argmax) == data.labels[utt][t];
      ++frames;
    }
  }
  return frames > 0 ? static_cast<double>(correct) / frames : 0.0;
}

GateCorrelation GateCorrelationFromSeries(
    const std::vector<std::vector<double>>& z_series,
    const std::vector<std::vector<double>>& r_series, long max_lag) {
  if (z_series.empty() || z_series.size() != r_series.size()) {
    throw ArgumentError("GateCorrelationFromSeries: empty or mismatched");
  }
  GateCorrelation out;
  out.max_lag = max_lag;
  out.czr.assign(2 * max_lag + 1, 0.0);
  out.czz.assign(2 * max_lag + 1, 0.0);
  for (std::size_t u = 0; u < z_series.size(); ++u) {
    const auto& z = z_series[u];
    const auto& r = r_series[u];
    if (z.size() != r.size()) {
      throw ArgumentError("GateCorrelationFromSeries: length mismatch");
    }
    const long t_len = static_cast<long>(z.size());
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
      double czr = 0.0, czz = 0.0;
      for (long t = 0; t < t_len; ++t) {
        const long s = t + lag;
        if (s >= 0 && s < t_len) {
          czr += z[t] * r[s];
          czz += z[t] * z[s];
        }
      }
      out.czr[lag + max_lag] += czr;
      out.czz[lag + max_lag] += czz;
    }
  }
  const double inv = 1.0 / static_cast<double>(z_series.size());
  for (auto& v : out.czr) v *= inv;
  for (auto& v : out.czz) v *= inv;
  const double peak = *std::max_element(out.czz.begin(), out.czz.end());
  if (peak > 0.0) {
    for (auto& v : out.czr) v /= peak;
    for (auto& v : out.czz) v /= peak;
  }
  return out;
}

GateCorrelation ComputeGateCorrelation(RnnClassifier* model,
                                       const SequenceDataset& data,
                                       long max_lag) {
  if (data.inputs.empty()) {
    throw ArgumentError("ComputeGateCorrelation: empty dataset");
  }
  auto* gru = dynamic_cast<GruCell*>(&model->stack().layer(0));
  if (gru == nullptr) {
    auto* bidi = dynamic_cast<BidirectionalCell*>(&model->stack().layer(0));
    if (bidi != nullptr) {
      gru = dynamic_cast<GruCell*>(&bidi->forward_cell());
    }
  }
  if (gru == nullptr) {
    throw ArgumentError("ComputeGateCorrelation: first layer is not a GRU");
  }

  std::vector<std::vector<double>> z_series, r_series;
  for (const auto& utterance : data.inputs) {
    model->Forward(utterance, RunMode::kInference, nullptr);
    const Seq& z = gru->update_gates();
    const Seq& r = gru->reset_gates();
    std::vector<double> zbar(z.size()), rbar(r.size());
    for (std::size_t t = 0; t < z.size(); ++t) {
      double zm = 0.0, rm = 0.0;
      for (std::size_t i = 0; i < z[t].size(); ++i) {
        zm += z[t].values()[i];
        rm += r[t].values()[i];
      }
      zbar[t] = zm / static_cast<double>(z[t].size());
      rbar[t] = rm / static_cast<double>(r[t].size());
    }
    z_series.push_back(std::move(zbar));
    r_series.push_back(std::move(rbar));
  }
  return GateCorrelationFromSeries(z_series, r_series, max_lag);
}

std::map<std::string, double> GradNormStats(RnnClassifier* model,
                                            const SequenceDataset& data) {
  if (data.inputs.empty()) throw ArgumentError("GradNormStats: empty dataset");
  ParamSet params = model->Params();
  std::map<std::string, double> norms;
  for (const auto& p : params) norms[p.name] = 0.0;

  Rng rng = MakeRng(0);  // deterministic masks when dropout is configured
  for (std::size_t utt = 0; utt < data.inputs.size(); ++utt) {
    model->ZeroGrad();
    Seq logp = model->Forward(data.inputs[utt], RunMode::kTrain, &rng);
    LossGrad loss = UtteranceLoss(logp, data.labels[utt], nullptr);
    Seq dlogp(logp.size());
    for (std::size_t t = 0; t < logp.size(); ++t) {
      dlogp[t] = Matrix(1, loss.grad.cols());
      for (std::size_t j = 0; j < loss.grad.cols(); ++j) {
        dlogp[t](0, j) = loss.grad(t, j);
      }
    }
    model->Backward(dlogp);
    for (const auto& p : params) {
      double norm2 = 0.0;
      for (std::size_t k = 0; k < p.size; ++k) norm2 += p.grad[k] * p.grad[k];
      norms[p.name] += std::sqrt(norm2);
    }
  }
  const double inv = 1.0 / static_cast<double>(data.inputs.size());
  for (auto& [name, value] : norms) value *= inv;
  return norms;
}

}  // namespace dsr
