// src/synthetic.cc

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

#include "dsr/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dsr/common.h"

namespace dsr {

namespace {

// Two-pole resonator y[n] = x[n] + a1 y[n-1] + a2 y[n-2].
struct Resonator {
  double a1, a2, y1 = 0.0, y2 = 0.0;

  Resonator(double freq_hz, double bandwidth_hz, double fs) {
    const double r = std::exp(-M_PI * bandwidth_hz / fs);
    a1 = 2.0 * r * std::cos(2.0 * M_PI * freq_hz / fs);
    a2 = -r * r;
  }

  double step(double x) {
    const double y = x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

AudioSignal SynthSpeechLike(double seconds, double sample_rate,
                            std::uint64_t seed) {
  if (seconds <= 0.0 || sample_rate <= 0.0) {
    throw ArgumentError("SynthSpeechLike: invalid duration or rate");
  }
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);

  AudioSignal out;
  out.sample_rate = sample_rate;
  out.samples.assign(static_cast<std::size_t>(seconds * sample_rate), 0.0);

  std::size_t pos = 0;
  while (pos < out.samples.size()) {
    const double kind = u(rng);
    const std::size_t seg_len = static_cast<std::size_t>(
        (0.06 + 0.12 * u(rng)) * sample_rate);  // 60-180 ms
    const std::size_t end = std::min(pos + seg_len, out.samples.size());

    if (kind < 0.15) {
      // pause
    } else if (kind < 0.55) {
      // voiced: glottal-like pulse train through two formant resonators
      const double f0 = 90.0 + 130.0 * u(rng);
      const std::size_t period =
          static_cast<std::size_t>(sample_rate / f0);
      Resonator f1(300.0 + 500.0 * u(rng), 80.0 + 60.0 * u(rng), sample_rate);
      Resonator f2(900.0 + 1900.0 * u(rng), 120.0 + 120.0 * u(rng),
                   sample_rate);
      const double amp = 0.02 + 0.03 * u(rng);
      for (std::size_t i = pos; i < end; ++i) {
        const double pulse = ((i - pos) % period == 0) ? 1.0 : 0.0;
        out.samples[i] = amp * f2.step(f1.step(pulse));
      }
    } else {
      // unvoiced: noise through a single higher resonance, lower level
      Resonator fric(2000.0 + 4000.0 * u(rng), 600.0 + 600.0 * u(rng),
                     sample_rate);
      const double amp = 0.004 + 0.008 * u(rng);
      for (std::size_t i = pos; i < end; ++i) {
        out.samples[i] = amp * fric.step(g(rng));
      }
    }

    // short raised-cosine edges to avoid segment clicks
    const std::size_t ramp =
        std::min<std::size_t>(static_cast<std::size_t>(0.005 * sample_rate),
                              (end - pos) / 2);
    for (std::size_t k = 0; k < ramp; ++k) {
      const double w = 0.5 * (1.0 - std::cos(M_PI * k / ramp));
      out.samples[pos + k] *= w;
      out.samples[end - 1 - k] *= w;
    }
    pos = end;
  }
  return out;
}

JointDataset MakeJointDataset(const JointTaskConfig& c) {
  if (c.n_classes < 2 || c.n_mono < 1 || c.feature_dim < 1 || c.n_frames < 1) {
    throw ArgumentError("MakeJointDataset: invalid config");
  }
  Rng rng = MakeRng(c.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> class_d(0, c.n_classes - 1);
  std::uniform_int_distribution<int> seg_d(c.min_segment, c.max_segment);

  // class templates
  Matrix means(c.n_classes, c.feature_dim);
  for (std::size_t i = 0; i < means.size(); ++i) means.values()[i] = 1.5 * g(rng);

  // clean stream: class-conditioned segments
  const int n = c.n_frames;
  Matrix clean(n, c.feature_dim);
  std::vector<int> labels(n);
  int t = 0;
  while (t < n) {
    const int cls = class_d(rng);
    const int len = std::min(seg_d(rng), n - t);
    for (int k = 0; k < len; ++k) {
      labels[t] = cls;
      for (int d = 0; d < c.feature_dim; ++d) {
        clean(t, d) = means(cls, d) + c.within_class_std * g(rng);
      }
      ++t;
    }
  }

  // noisy stream: causal FIR across time per dimension, plus noise
  std::vector<double> fir(c.fir_length);
  fir[0] = 1.0;
  for (int k = 1; k < c.fir_length; ++k) {
    fir[k] = std::pow(c.fir_decay, k) * (0.5 + 0.5 * std::abs(g(rng)));
  }
  Matrix noisy(n, c.feature_dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < c.feature_dim; ++d) {
      double acc = 0.0;
      for (int k = 0; k < c.fir_length && k <= i; ++k) {
        acc += fir[k] * clean(i - k, d);
      }
      noisy(i, d) = acc + c.noise_std * g(rng);
    }
  }

  const int ctx_half = c.context_frames / 2;
  const int tgt_half = c.target_frames / 2;
  auto clamp_frame = [n](int i) { return std::clamp(i, 0, n - 1); };

  JointDataset out;
  out.n_classes = c.n_classes;
  out.n_mono = c.n_mono;
  out.feature_dim = c.feature_dim;
  out.context_frames = c.context_frames;
  out.target_frames = c.target_frames;
  out.noisy_context = Matrix(n, c.context_frames * c.feature_dim);
  out.clean_targets = Matrix(n, c.target_frames * c.feature_dim);
  out.noisy_center = Matrix(n, c.feature_dim);
  out.labels = labels;
  out.mono.resize(n);
  for (int i = 0; i < n; ++i) {
    out.mono[i] = labels[i] % c.n_mono;
    for (int w = 0; w < c.context_frames; ++w) {
      const int src = clamp_frame(i - ctx_half + w);
      for (int d = 0; d < c.feature_dim; ++d) {
        out.noisy_context(i, w * c.feature_dim + d) = noisy(src, d);
      }
    }
    for (int w = 0; w < c.target_frames; ++w) {
      const int src = clamp_frame(i - tgt_half + w);
      for (int d = 0; d < c.feature_dim; ++d) {
        out.clean_targets(i, w * c.feature_dim + d) = clean(src, d);
      }
    }
    for (int d = 0; d < c.feature_dim; ++d) {
      out.noisy_center(i, d) = noisy(i, d);
    }
  }
  return out;
}

SequenceDataset MakeSequenceDataset(int n_utterances, int min_len, int max_len,
                                    int feature_dim, int n_classes,
                                    std::uint64_t seed) {
  if (n_utterances < 1 || min_len < 1 || max_len < min_len || n_classes < 2) {
    throw ArgumentError("MakeSequenceDataset: invalid config");
  }
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> class_d(0, n_classes - 1);
  std::uniform_int_distribution<int> len_d(min_len, max_len);
  std::uniform_int_distribution<int> seg_d(3, 8);

  Matrix means(n_classes, feature_dim);
  for (std::size_t i = 0; i < means.size(); ++i) means.values()[i] = 1.2 * g(rng);

  SequenceDataset out;
  out.n_classes = n_classes;
  out.feature_dim = feature_dim;
  out.inputs.resize(n_utterances);
  out.labels.resize(n_utterances);
  for (int utt = 0; utt < n_utterances; ++utt) {
    const int len = len_d(rng);
    out.inputs[utt].reserve(len);
    out.labels[utt].reserve(len);
    int t = 0;
    while (t < len) {
      const int cls = class_d(rng);
      const int seg = std::min(seg_d(rng), len - t);
      for (int k = 0; k < seg; ++k, ++t) {
        Matrix x(1, feature_dim);
        for (int d = 0; d < feature_dim; ++d) {
          x(0, d) = means(cls, d) + 0.4 * g(rng);
        }
        out.inputs[utt].push_back(std::move(x));
        out.labels[utt].push_back(cls);
      }
    }
  }
  return out;
}

}  // namespace dsr
