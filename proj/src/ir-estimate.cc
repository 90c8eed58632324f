// src/ir-estimate.cc

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

#include "dsr/ir-estimate.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dsr/common.h"
#include "dsr/fft.h"
#include "dsr/signal-ops.h"

namespace dsr {

namespace {

// Band edges of a sweep, read off its spectrum as the 0.5 and 99.5 percent
// energy quantiles. Quantiles are robust against the strong spectral tilt of
// an exponential sweep, which would defeat a fixed dB-below-peak cut.
void SweepBand(const AudioSignal& s, double* f_lo, double* f_hi) {
  const std::size_t nfft = NextPow2(s.samples.size());
  std::vector<double> p = PowerSpectrum(s.samples, nfft);
  double total = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) total += p[k];
  const double bin_hz = s.sample_rate / static_cast<double>(nfft);
  double acc = 0.0;
  std::size_t lo = 1, hi = p.size() - 1;
  for (std::size_t k = 1; k < p.size(); ++k) {
    acc += p[k];
    if (acc >= 0.005 * total) {
      lo = k;
      break;
    }
  }
  acc = 0.0;
  for (std::size_t k = p.size(); k-- > 1;) {
    acc += p[k];
    if (acc >= 0.005 * total) {
      hi = k;
      break;
    }
  }
  *f_lo = std::max(bin_hz, static_cast<double>(lo) * bin_hz);
  *f_hi = std::max(*f_lo * 1.0001, static_cast<double>(hi) * bin_hz);
}

}  // namespace

AudioSignal WhitenPinkSpectrum(const AudioSignal& signal, double f_lo_hz,
                               double f_hi_hz) {
  if (signal.samples.empty()) throw ArgumentError("Whiten: empty signal");
  if (!(f_lo_hz > 0.0 && f_lo_hz < f_hi_hz)) {
    throw ArgumentError("Whiten: need 0 < f_lo < f_hi");
  }
  const std::size_t n = signal.samples.size();
  const std::size_t nfft = NextPow2(2 * n);
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = signal.samples[i];
  Fft(&buf, false);

  const double f_ref = std::sqrt(f_lo_hz * f_hi_hz);
  const double bin_hz = signal.sample_rate / static_cast<double>(nfft);
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double f = std::clamp(static_cast<double>(k) * bin_hz, f_lo_hz, f_hi_hz);
    const double g = std::sqrt(f / f_ref);
    buf[k] *= g;
    if (k > 0 && k < nfft / 2) buf[nfft - k] *= g;
  }
  Fft(&buf, true);

  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = buf[i].real();
  return out;
}

ImpulseResponse EstimateIr(const AudioSignal& excitation,
                           const AudioSignal& recording, ExcitationKind kind,
                           std::size_t ir_length) {
  if (excitation.samples.empty() || recording.samples.empty()) {
    throw ArgumentError("EstimateIr: empty input");
  }
  if (excitation.sample_rate != recording.sample_rate) {
    throw ArgumentError("EstimateIr: sample rate mismatch");
  }
  if (recording.samples.size() < excitation.samples.size()) {
    throw ArgumentError("EstimateIr: recording shorter than excitation");
  }
  if (ir_length == 0) throw ArgumentError("EstimateIr: ir_length must be > 0");

  AudioSignal ex = excitation;
  AudioSignal rec = recording;
  if (kind == ExcitationKind::kEss) {
    double f_lo = 0.0, f_hi = 0.0;
    SweepBand(excitation, &f_lo, &f_hi);
    ex = WhitenPinkSpectrum(excitation, f_lo, f_hi);
    rec = WhitenPinkSpectrum(recording, f_lo, f_hi);
  }

  double energy = 0.0;
  for (double v : ex.samples) energy += v * v;
  if (energy == 0.0) throw ArgumentError("EstimateIr: zero-energy excitation");

  // Lags [0, L_rec-1]: the channel is causal, the linear response cannot
  // precede lag 0, and distortion products fall at negative lags anyway.
  const std::size_t max_lag = rec.samples.size() - 1;
  std::vector<double> raw = CrossCorrelate(ex, rec, max_lag);
  for (double& v : raw) v /= energy;

  std::size_t peak = 0;
  double peak_abs = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double a = std::abs(raw[i]);
    sum_sq += raw[i] * raw[i];
    if (a > peak_abs) {
      peak_abs = a;
      peak = i;
    }
  }
  const double rms = std::sqrt(sum_sq / static_cast<double>(raw.size()));
  if (peak_abs < 8.0 * rms) {
    throw NumericError("EstimateIr: no peak above the noise floor");
  }

  ImpulseResponse ir;
  ir.signal.sample_rate = recording.sample_rate;
  ir.signal.samples.assign(ir_length, 0.0);
  const long start = static_cast<long>(peak) - static_cast<long>(kIrTrimPrefix);
  for (std::size_t i = 0; i < ir_length; ++i) {
    const long idx = start + static_cast<long>(i);
    if (idx >= 0 && idx < static_cast<long>(raw.size())) {
      ir.signal.samples[i] = raw[idx];
    }
  }
  ir.max_reflection_order = -1;
  return ir;
}

double IrRecoveryCorrelation(const ImpulseResponse& estimated,
                             const ImpulseResponse& truth) {
  const auto& a = estimated.signal.samples;
  const auto& b = truth.signal.samples;
  if (a.empty() || b.empty()) {
    throw ArgumentError("IrRecoveryCorrelation: empty IR");
  }
  const long shift = static_cast<long>(DirectPathDelaySamples(estimated)) -
                     static_cast<long>(DirectPathDelaySamples(truth));
  // zero-mean normalized cross-correlation over the truth extent; the mean
  // removal drops the DC bin, which no band-limited excitation can observe
  double best = 0.0;
  for (long off = shift - 2; off <= shift + 2; ++off) {
    double ma = 0.0, mb = 0.0;
    const double n = static_cast<double>(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
      const long i = static_cast<long>(j) + off;
      if (i >= 0 && i < static_cast<long>(a.size())) ma += a[i];
      mb += b[j];
    }
    ma /= n;
    mb /= n;
    double dot = 0.0, ea = 0.0, eb = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const long i = static_cast<long>(j) + off;
      const double av =
          ((i >= 0 && i < static_cast<long>(a.size())) ? a[i] : 0.0) - ma;
      const double bv = b[j] - mb;
      dot += av * bv;
      ea += av * av;
      eb += bv * bv;
    }
    if (ea > 0.0 && eb > 0.0) {
      best = std::max(best, dot / std::sqrt(ea * eb));
    }
  }
  return best;
}

}  // namespace dsr
