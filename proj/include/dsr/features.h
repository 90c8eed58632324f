// dsr/features.h

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

#ifndef DSR_FEATURES_H_
#define DSR_FEATURES_H_

#include <cstddef>
#include <vector>

#include "dsr/audio.h"
#include "dsr/signal-ops.h"

namespace dsr {

enum class FeatureKind {
  kFbank,      // 40 log mel filterbank energies
  kMfcc,       // 13 cepstral coefficients
  kMfccDeltas, // 13 + deltas + delta-deltas = 39
};

// frames x dims, row major.
struct FeatureMatrix {
  std::vector<double> values;
  std::size_t frames = 0;
  std::size_t dims = 0;
  double frame_shift_ms = 10.0;
  FeatureKind kind = FeatureKind::kFbank;

  double& at(std::size_t f, std::size_t d) { return values[f * dims + d]; }
  double at(std::size_t f, std::size_t d) const { return values[f * dims + d]; }
};

struct MelFilterbankSpec {
  std::size_t n_filters = 40;
  double f_min = 0.0;
  double f_max = 0.0;  // 0 means fs/2
  std::size_t fft_size = 512;
};

struct ContextWindowSpec {
  std::size_t past = 0;    // N_p
  std::size_t future = 0;  // N_f

  // balance factor in percent: 100 * N_p / (N_p + N_f)
  double rho_cw() const {
    return 100.0 * static_cast<double>(past) /
           static_cast<double>(past + future);
  }
};

struct LagCorrelation {
  long min_lag = 0;  // -N_p
  long max_lag = 0;  // +N_f
  std::vector<double> r;  // index i corresponds to lag min_lag + i

  double at_lag(long p) const { return r[p - min_lag]; }
};

struct FrameImportance {
  std::vector<double> importance;  // index i corresponds to lag min_lag + i
  long min_lag = 0;
};

// mel(f) = 2595 log10(1 + f/700), the HTK convention.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filter weights, n_filters x (fft_size/2 + 1).
std::vector<std::vector<double>> MelFilterbankWeights(
    const MelFilterbankSpec& spec, double sample_rate);

// Orthonormal DCT-II of a vector, first `keep` coefficients.
std::vector<double> DctIIOrtho(const std::vector<double>& x, std::size_t keep);

// 25 ms / 10 ms Hamming frames -> power spectrum -> mel filterbank -> natural
// log with a 1e-10 floor. Silence is handled by the floor, never an error.
FeatureMatrix Fbank(const AudioSignal& signal,
                    const MelFilterbankSpec& spec = MelFilterbankSpec{});

// DCT-II of the FBANK rows, first 13 coefficients kept.
FeatureMatrix Mfcc(const AudioSignal& signal,
                   const MelFilterbankSpec& spec = MelFilterbankSpec{});

// Appends derivative features computed with the symmetric +-2 regression
// window; order 1 doubles the width, order 2 triples it (13 -> 39).
FeatureMatrix Deltas(const FeatureMatrix& features, int order = 2);

// Per-dimension zero mean, unit variance over the utterance. Zero-variance
// dimensions are left at zero.
FeatureMatrix Cmvn(const FeatureMatrix& features);

// Row k becomes concat(y_{k-Np}, ..., y_k, ..., y_{k+Nf}); out-of-range rows
// replicate the nearest edge frame.
FeatureMatrix AssembleContext(const FeatureMatrix& features,
                              const ContextWindowSpec& spec);

// Pearson correlation r(p) between x_k and y_{k+p} for p in [-Np, Nf],
// computed per dimension over the overlapping frames and averaged over
// dimensions.
LagCorrelation PearsonLagCorrelation(const FeatureMatrix& x,
                                     const FeatureMatrix& y, std::size_t n_past,
                                     std::size_t n_future);

// I_p = sum_ij w_{p,i,j}^2 over the first-layer weights feeding each context
// position, normalized so the largest value is 1. `weights` is neurons x
// ((Np+Nf+1) * dim), row major.
FrameImportance ComputeFrameImportance(const std::vector<double>& weights,
                                       std::size_t n_neurons,
                                       std::size_t n_past, std::size_t n_future,
                                       std::size_t dim);

}  // namespace dsr

#endif  // DSR_FEATURES_H_
