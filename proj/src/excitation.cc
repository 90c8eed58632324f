// src/excitation.cc

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

#include "dsr/excitation.h"

#include <cmath>

#include "dsr/common.h"

namespace dsr {

namespace {

// One primitive polynomial per order (1-indexed feedback stages, Fibonacci
// form). Every entry is verified maximal-length by the test suite.
struct TapEntry {
  int n;
  std::uint32_t taps[4];
};

constexpr TapEntry kMlsTaps[25] = {
    {0, {0, 0, 0, 0}},            // order 0 (unused)
    {0, {0, 0, 0, 0}},            // order 1 (unused)
    {2, {2, 1, 0, 0}},            // 2
    {2, {3, 2, 0, 0}},            // 3
    {2, {4, 3, 0, 0}},            // 4
    {2, {5, 3, 0, 0}},            // 5
    {2, {6, 5, 0, 0}},            // 6
    {2, {7, 6, 0, 0}},            // 7
    {4, {8, 6, 5, 4}},            // 8
    {2, {9, 5, 0, 0}},            // 9
    {2, {10, 7, 0, 0}},           // 10
    {2, {11, 9, 0, 0}},           // 11
    {4, {12, 6, 4, 1}},           // 12
    {4, {13, 4, 3, 1}},           // 13
    {4, {14, 5, 3, 1}},           // 14
    {2, {15, 14, 0, 0}},          // 15
    {4, {16, 15, 13, 4}},         // 16
    {2, {17, 14, 0, 0}},          // 17
    {2, {18, 11, 0, 0}},          // 18
    {4, {19, 6, 2, 1}},           // 19
    {2, {20, 17, 0, 0}},          // 20
    {2, {21, 19, 0, 0}},          // 21
    {2, {22, 21, 0, 0}},          // 22
    {2, {23, 18, 0, 0}},          // 23
    {4, {24, 23, 22, 17}},        // 24
};

void ValidateSweepSpec(const ExcitationSpec& spec) {
  if (spec.length == 0) throw ArgumentError("excitation: length must be > 0");
  if (spec.amplitude <= 0.0) {
    throw ArgumentError("excitation: amplitude must be > 0");
  }
  if (!(spec.omega_start > 0.0 && spec.omega_start < spec.omega_end &&
        spec.omega_end <= M_PI)) {
    throw ArgumentError("excitation: need 0 < w1 < w2 <= pi");
  }
  if (spec.sample_rate <= 0.0) {
    throw ArgumentError("excitation: sample rate must be > 0");
  }
  if (spec.fade_ms < 0.0) throw ArgumentError("excitation: negative fade");
}

}  // namespace

const std::uint32_t* MlsTaps(int order, int* n_taps) {
  if (order < 2 || order > 24) return nullptr;
  *n_taps = kMlsTaps[order].n;
  return kMlsTaps[order].taps;
}

AudioSignal GenerateMls(int order, double sample_rate, double amplitude) {
  int n_taps = 0;
  const std::uint32_t* taps = MlsTaps(order, &n_taps);
  if (taps == nullptr) {
    throw ArgumentError("GenerateMls: order must be in [2, 24]");
  }
  const std::size_t length = (std::size_t{1} << order) - 1;
  const std::uint32_t mask = (order == 32) ? ~0u : ((1u << order) - 1);
  std::uint32_t state = mask;  // all ones

  AudioSignal out;
  out.sample_rate = sample_rate;
  out.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    const std::uint32_t bit = (state >> (order - 1)) & 1u;
    out.samples[i] = bit ? amplitude : -amplitude;
    std::uint32_t fb = 0;
    for (int t = 0; t < n_taps; ++t) {
      fb ^= (state >> (taps[t] - 1)) & 1u;
    }
    state = ((state << 1) | fb) & mask;
  }
  return out;
}

AudioSignal GenerateLss(const ExcitationSpec& spec) {
  ValidateSweepSpec(spec);
  const double w1 = spec.omega_start;
  const double w2 = spec.omega_end;
  const double l = static_cast<double>(spec.length);
  AudioSignal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(spec.length);
  for (std::size_t n = 0; n < spec.length; ++n) {
    const double t = static_cast<double>(n);
    const double phase = w1 * t + (w2 - w1) / l * t * t / 2.0;
    out.samples[n] = spec.amplitude * std::sin(phase);
  }
  return ApplyFades(out, spec.fade_ms);
}

AudioSignal GenerateEss(const ExcitationSpec& spec) {
  ValidateSweepSpec(spec);
  const double w1 = spec.omega_start;
  const double w2 = spec.omega_end;
  if (w1 == w2) throw ArgumentError("GenerateEss: w1 == w2");
  const double l = static_cast<double>(spec.length);
  const double log_ratio = std::log(w2 / w1);
  const double k = w1 * l / log_ratio;
  AudioSignal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(spec.length);
  for (std::size_t n = 0; n < spec.length; ++n) {
    const double t = static_cast<double>(n);
    const double phase = k * (std::exp(t / l * log_ratio) - 1.0);
    out.samples[n] = spec.amplitude * std::sin(phase);
  }
  return ApplyFades(out, spec.fade_ms);
}

AudioSignal GenerateExcitation(const ExcitationSpec& spec) {
  switch (spec.kind) {
    case ExcitationKind::kMls: {
      int order = 0;
      while ((std::size_t{1} << order) - 1 < spec.length && order <= 24) {
        ++order;
      }
      if ((std::size_t{1} << order) - 1 != spec.length) {
        throw ArgumentError("GenerateExcitation: MLS length must be 2^m - 1");
      }
      return GenerateMls(order, spec.sample_rate, spec.amplitude);
    }
    case ExcitationKind::kLss:
      return GenerateLss(spec);
    case ExcitationKind::kEss:
      return GenerateEss(spec);
  }
  throw ArgumentError("GenerateExcitation: unknown kind");
}

AudioSignal ApplyFades(const AudioSignal& signal, double fade_ms) {
  if (fade_ms < 0.0) throw ArgumentError("ApplyFades: negative fade");
  const std::size_t fade =
      static_cast<std::size_t>(std::lround(fade_ms * signal.sample_rate / 1000.0));
  if (fade == 0) return signal;
  if (2 * fade > signal.samples.size()) {
    throw ArgumentError("ApplyFades: fades longer than half the signal");
  }
  AudioSignal out = signal;
  for (std::size_t k = 0; k < fade; ++k) {
    const double w =
        0.5 * (1.0 - std::cos(M_PI * static_cast<double>(k) /
                              static_cast<double>(fade)));
    out.samples[k] *= w;
    out.samples[out.samples.size() - 1 - k] *= w;
  }
  return out;
}

}  // namespace dsr
