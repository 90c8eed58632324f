// src/signal-ops.cc

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

#include "dsr/signal-ops.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dsr/common.h"
#include "dsr/fft.h"

namespace dsr {

namespace {

// Direct summation below this many multiply-adds, FFT above.
constexpr std::size_t kDirectWorkLimit = std::size_t{1} << 18;

double MeanPower(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> ConvolveDirect(std::span<const double> x,
                                   std::span<const double> h) {
  if (x.empty() || h.empty()) {
    throw ArgumentError("ConvolveDirect: empty input");
  }
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t m = 0; m < h.size(); ++m) {
    const double hm = h[m];
    if (hm == 0.0) continue;
    for (std::size_t n = 0; n < x.size(); ++n) {
      y[n + m] += x[n] * hm;
    }
  }
  return y;
}

std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h) {
  if (x.empty() || h.empty()) {
    throw ArgumentError("ConvolveFft: empty input");
  }
  const std::size_t out_len = x.size() + h.size() - 1;
  const std::size_t nfft = NextPow2(out_len);
  std::vector<std::complex<double>> a(nfft, {0.0, 0.0});
  std::vector<std::complex<double>> b(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (std::size_t i = 0; i < h.size(); ++i) b[i] = h[i];
  Fft(&a, false);
  Fft(&b, false);
  for (std::size_t i = 0; i < nfft; ++i) a[i] *= b[i];
  Fft(&a, true);
  std::vector<double> y(out_len);
  for (std::size_t i = 0; i < out_len; ++i) y[i] = a[i].real();
  return y;
}

AudioSignal Convolve(const AudioSignal& x, std::span<const double> h,
                     ConvTail tail) {
  if (x.samples.empty() || h.empty()) {
    throw ArgumentError("Convolve: empty input");
  }
  const std::size_t work = x.samples.size() * h.size();
  AudioSignal out;
  out.sample_rate = x.sample_rate;
  out.samples = work <= kDirectWorkLimit ? ConvolveDirect(x.samples, h)
                                         : ConvolveFft(x.samples, h);
  if (tail == ConvTail::kTrimToInput) {
    out.samples.resize(x.samples.size());
  }
  return out;
}

std::vector<double> CrossCorrelate(const AudioSignal& s, const AudioSignal& y,
                                   std::size_t max_lag) {
  if (s.samples.empty() || y.samples.empty()) {
    throw ArgumentError("CrossCorrelate: empty input");
  }
  if (s.sample_rate != y.sample_rate) {
    throw ArgumentError("CrossCorrelate: sample rate mismatch");
  }
  const auto& sv = s.samples;
  const auto& yv = y.samples;
  const std::size_t ls = sv.size();
  const std::size_t ly = yv.size();
  std::vector<double> r(2 * max_lag + 1, 0.0);

  const std::size_t work = (2 * max_lag + 1) * ls;
  if (work <= kDirectWorkLimit) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const long lag = static_cast<long>(i) - static_cast<long>(max_lag);
      double acc = 0.0;
      for (std::size_t l = 0; l < ls; ++l) {
        const long idx = static_cast<long>(l) + lag;
        if (idx >= 0 && idx < static_cast<long>(ly)) {
          acc += sv[l] * yv[idx];
        }
      }
      r[i] = acc;
    }
    return r;
  }

  // R[n] = conv(reverse(s), y)[n + ls - 1]
  std::vector<double> rs(sv.rbegin(), sv.rend());
  std::vector<double> full = ConvolveFft(rs, yv);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const long lag = static_cast<long>(i) - static_cast<long>(max_lag);
    const long idx = lag + static_cast<long>(ls) - 1;
    if (idx >= 0 && idx < static_cast<long>(full.size())) {
      r[i] = full[idx];
    }
  }
  return r;
}

std::vector<double> MakeWindow(WindowKind kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::kHamming && length > 1) {
    for (std::size_t k = 0; k < length; ++k) {
      w[k] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(k) /
                                    static_cast<double>(length - 1));
    }
  }
  return w;
}

FrameSet FrameSignal(const AudioSignal& x, double frame_ms, double shift_ms,
                     WindowKind window) {
  if (frame_ms <= 0.0 || shift_ms <= 0.0 || shift_ms > frame_ms) {
    throw ArgumentError("FrameSignal: need 0 < shift <= frame length");
  }
  FrameSet fs;
  fs.frame_length =
      static_cast<std::size_t>(std::lround(frame_ms * x.sample_rate / 1000.0));
  fs.frame_shift =
      static_cast<std::size_t>(std::lround(shift_ms * x.sample_rate / 1000.0));
  fs.window = window;
  if (fs.frame_length == 0 || fs.frame_shift == 0) {
    throw ArgumentError("FrameSignal: frame/shift rounds to zero samples");
  }
  if (x.samples.size() < fs.frame_length) {
    return fs;  // shorter than one frame: empty, not an error
  }
  const std::size_t n_frames =
      (x.samples.size() - fs.frame_length) / fs.frame_shift + 1;
  const std::vector<double> w = MakeWindow(window, fs.frame_length);
  fs.frames.resize(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t off = f * fs.frame_shift;
    auto& frame = fs.frames[f];
    frame.resize(fs.frame_length);
    for (std::size_t k = 0; k < fs.frame_length; ++k) {
      frame[k] = x.samples[off + k] * w[k];
    }
  }
  return fs;
}

AudioSignal MixAtSnr(const AudioSignal& clean, const AudioSignal& noise,
                     double snr_db) {
  if (clean.samples.empty() || noise.samples.empty()) {
    throw ArgumentError("MixAtSnr: empty input");
  }
  if (clean.sample_rate != noise.sample_rate) {
    throw ArgumentError("MixAtSnr: sample rate mismatch");
  }
  const std::size_t n = clean.samples.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = noise.samples[i % noise.samples.size()];
  }
  const double p_clean = MeanPower(clean.samples);
  const double p_noise = MeanPower(v);
  if (p_clean == 0.0 || p_noise == 0.0) {
    throw ArgumentError("MixAtSnr: zero-power input");
  }
  const double gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  AudioSignal out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = clean.samples[i] + gain * v[i];
  }
  return out;
}

}  // namespace dsr
