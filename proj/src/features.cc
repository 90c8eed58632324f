// src/features.cc

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

#include "dsr/features.h"

#include <algorithm>
#include <cmath>

#include "dsr/common.h"
#include "dsr/fft.h"

namespace dsr {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr std::size_t kMfccCoeffs = 13;

FeatureMatrix LogMel(const AudioSignal& signal, const MelFilterbankSpec& spec) {
  FrameSet frames = FrameSignal(signal, 25.0, 10.0, WindowKind::kHamming);
  const auto fb = MelFilterbankWeights(spec, signal.sample_rate);

  FeatureMatrix out;
  out.frames = frames.frames.size();
  out.dims = spec.n_filters;
  out.frame_shift_ms = 10.0;
  out.kind = FeatureKind::kFbank;
  out.values.assign(out.frames * out.dims, 0.0);
  for (std::size_t f = 0; f < out.frames; ++f) {
    const auto p = PowerSpectrum(frames.frames[f], spec.fft_size);
    for (std::size_t m = 0; m < spec.n_filters; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) e += fb[m][k] * p[k];
      out.at(f, m) = std::log(std::max(e, kLogFloor));
    }
  }
  return out;
}

}  // namespace

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<std::vector<double>> MelFilterbankWeights(
    const MelFilterbankSpec& spec, double sample_rate) {
  if (spec.n_filters < 2) {
    throw ArgumentError("MelFilterbankWeights: need at least 2 filters");
  }
  const double f_max = spec.f_max > 0.0 ? spec.f_max : sample_rate / 2.0;
  if (!(spec.f_min >= 0.0 && spec.f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw ArgumentError("MelFilterbankWeights: need 0 <= f_min < f_max <= fs/2");
  }
  const std::size_t n_bins = spec.fft_size / 2 + 1;
  const double mel_lo = HzToMel(spec.f_min);
  const double mel_hi = HzToMel(f_max);

  // n_filters + 2 equally spaced mel points define the triangle edges
  std::vector<double> edges(spec.n_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(spec.n_filters + 1));
  }

  std::vector<std::vector<double>> w(spec.n_filters,
                                     std::vector<double>(n_bins, 0.0));
  for (std::size_t m = 0; m < spec.n_filters; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f =
          static_cast<double>(k) * sample_rate / static_cast<double>(spec.fft_size);
      if (f > left && f < center) {
        w[m][k] = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        w[m][k] = (right - f) / (right - center);
      }
    }
  }
  return w;
}

std::vector<double> DctIIOrtho(const std::vector<double>& x, std::size_t keep) {
  const std::size_t n = x.size();
  if (n == 0) throw ArgumentError("DctIIOrtho: empty input");
  const std::size_t m = std::min(keep, n);
  std::vector<double> c(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(M_PI * static_cast<double>(k) *
                             (2.0 * static_cast<double>(i) + 1.0) /
                             (2.0 * static_cast<double>(n)));
    }
    const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                : std::sqrt(2.0 / static_cast<double>(n));
    c[k] = scale * acc;
  }
  return c;
}

FeatureMatrix Fbank(const AudioSignal& signal, const MelFilterbankSpec& spec) {
  return LogMel(signal, spec);
}

FeatureMatrix Mfcc(const AudioSignal& signal, const MelFilterbankSpec& spec) {
  FeatureMatrix mel = LogMel(signal, spec);
  FeatureMatrix out;
  out.frames = mel.frames;
  out.dims = kMfccCoeffs;
  out.frame_shift_ms = mel.frame_shift_ms;
  out.kind = FeatureKind::kMfcc;
  out.values.assign(out.frames * out.dims, 0.0);
  std::vector<double> row(mel.dims);
  for (std::size_t f = 0; f < mel.frames; ++f) {
    for (std::size_t d = 0; d < mel.dims; ++d) row[d] = mel.at(f, d);
    const auto c = DctIIOrtho(row, kMfccCoeffs);
    for (std::size_t d = 0; d < c.size(); ++d) out.at(f, d) = c[d];
  }
  return out;
}

FeatureMatrix Deltas(const FeatureMatrix& features, int order) {
  if (order < 1 || order > 2) throw ArgumentError("Deltas: order must be 1 or 2");
  if (features.frames == 0) throw ArgumentError("Deltas: empty features");

  // symmetric regression, window +-2, edges replicated
  auto derive = [&](const std::vector<double>& v) {
    const long n = static_cast<long>(features.frames);
    const long d = static_cast<long>(features.dims);
    std::vector<double> out(v.size(), 0.0);
    constexpr long kWin = 2;
    constexpr double kNorm = 10.0;  // 2 * (1^2 + 2^2)
    for (long f = 0; f < n; ++f) {
      for (long j = 0; j < d; ++j) {
        double acc = 0.0;
        for (long t = 1; t <= kWin; ++t) {
          const long fp = std::min(f + t, n - 1);
          const long fm = std::max(f - t, 0L);
          acc += static_cast<double>(t) * (v[fp * d + j] - v[fm * d + j]);
        }
        out[f * d + j] = acc / kNorm;
      }
    }
    return out;
  };

  const std::vector<double> d1 = derive(features.values);
  std::vector<double> d2;
  if (order == 2) d2 = derive(d1);

  FeatureMatrix out;
  out.frames = features.frames;
  out.dims = features.dims * static_cast<std::size_t>(order + 1);
  out.frame_shift_ms = features.frame_shift_ms;
  out.kind = order == 2 && features.kind == FeatureKind::kMfcc
                 ? FeatureKind::kMfccDeltas
                 : features.kind;
  out.values.assign(out.frames * out.dims, 0.0);
  for (std::size_t f = 0; f < out.frames; ++f) {
    for (std::size_t j = 0; j < features.dims; ++j) {
      out.at(f, j) = features.at(f, j);
      out.at(f, features.dims + j) = d1[f * features.dims + j];
      if (order == 2) out.at(f, 2 * features.dims + j) = d2[f * features.dims + j];
    }
  }
  return out;
}

FeatureMatrix Cmvn(const FeatureMatrix& features) {
  if (features.frames == 0) throw ArgumentError("Cmvn: empty features");
  FeatureMatrix out = features;
  const double n = static_cast<double>(features.frames);
  for (std::size_t d = 0; d < features.dims; ++d) {
    double mean = 0.0;
    for (std::size_t f = 0; f < features.frames; ++f) mean += features.at(f, d);
    mean /= n;
    double var = 0.0;
    for (std::size_t f = 0; f < features.frames; ++f) {
      const double c = features.at(f, d) - mean;
      var += c * c;
    }
    var /= n;
    if (var < 1e-20) {
      for (std::size_t f = 0; f < features.frames; ++f) out.at(f, d) = 0.0;
    } else {
      const double inv = 1.0 / std::sqrt(var);
      for (std::size_t f = 0; f < features.frames; ++f) {
        out.at(f, d) = (features.at(f, d) - mean) * inv;
      }
    }
  }
  return out;
}

FeatureMatrix AssembleContext(const FeatureMatrix& features,
                              const ContextWindowSpec& spec) {
  if (features.frames == 0) throw ArgumentError("AssembleContext: empty features");
  const long n = static_cast<long>(features.frames);
  const std::size_t width = spec.past + spec.future + 1;

  FeatureMatrix out;
  out.frames = features.frames;
  out.dims = width * features.dims;
  out.frame_shift_ms = features.frame_shift_ms;
  out.kind = features.kind;
  out.values.assign(out.frames * out.dims, 0.0);
  for (long f = 0; f < n; ++f) {
    for (std::size_t w = 0; w < width; ++w) {
      long src = f - static_cast<long>(spec.past) + static_cast<long>(w);
      src = std::clamp(src, 0L, n - 1);
      for (std::size_t d = 0; d < features.dims; ++d) {
        out.at(f, w * features.dims + d) = features.at(src, d);
      }
    }
  }
  return out;
}

LagCorrelation PearsonLagCorrelation(const FeatureMatrix& x,
                                     const FeatureMatrix& y,
                                     std::size_t n_past, std::size_t n_future) {
  if (x.dims != y.dims) {
    throw ArgumentError("PearsonLagCorrelation: dimension mismatch");
  }
  if (x.frames == 0 || y.frames == 0) {
    throw ArgumentError("PearsonLagCorrelation: empty features");
  }
  LagCorrelation out;
  out.min_lag = -static_cast<long>(n_past);
  out.max_lag = static_cast<long>(n_future);
  out.r.resize(n_past + n_future + 1, 0.0);

  for (long p = out.min_lag; p <= out.max_lag; ++p) {
    const long k_lo = std::max(0L, -p);
    const long k_hi =
        std::min(static_cast<long>(x.frames) - 1,
                 static_cast<long>(y.frames) - 1 - p);
    if (k_hi < k_lo + 1) {
      throw ArgumentError("PearsonLagCorrelation: overlap too short at lag " +
                          std::to_string(p));
    }
    const double n = static_cast<double>(k_hi - k_lo + 1);
    double mean_r = 0.0;
    for (std::size_t d = 0; d < x.dims; ++d) {
      double mx = 0.0, my = 0.0;
      for (long k = k_lo; k <= k_hi; ++k) {
        mx += x.at(k, d);
        my += y.at(k + p, d);
      }
      mx /= n;
      my /= n;
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (long k = k_lo; k <= k_hi; ++k) {
        const double a = x.at(k, d) - mx;
        const double b = y.at(k + p, d) - my;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
      }
      if (sxx <= 0.0 || syy <= 0.0) {
        throw NumericError(
            "PearsonLagCorrelation: zero-variance dimension, correlation "
            "undefined");
      }
      mean_r += sxy / std::sqrt(sxx * syy);
    }
    out.r[p - out.min_lag] = mean_r / static_cast<double>(x.dims);
  }
  return out;
}

FrameImportance ComputeFrameImportance(const std::vector<double>& weights,
                                       std::size_t n_neurons,
                                       std::size_t n_past,
                                       std::size_t n_future, std::size_t dim) {
  const std::size_t width = n_past + n_future + 1;
  if (weights.size() != n_neurons * width * dim) {
    throw ArgumentError("ComputeFrameImportance: weight shape mismatch");
  }
  FrameImportance out;
  out.min_lag = -static_cast<long>(n_past);
  out.importance.assign(width, 0.0);
  for (std::size_t j = 0; j < n_neurons; ++j) {
    for (std::size_t p = 0; p < width; ++p) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double w = weights[j * width * dim + p * dim + i];
        out.importance[p] += w * w;
      }
    }
  }
  const double max_i =
      *std::max_element(out.importance.begin(), out.importance.end());
  if (max_i <= 0.0) {
    throw NumericError("ComputeFrameImportance: all weights are zero");
  }
  for (double& v : out.importance) v /= max_i;
  return out;
}

}  // namespace dsr
