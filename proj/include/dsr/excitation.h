// dsr/excitation.h

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

#ifndef DSR_EXCITATION_H_
#define DSR_EXCITATION_H_

#include <cstddef>
#include <cstdint>

#include "dsr/audio.h"

namespace dsr {

enum class ExcitationKind {
  kMls,  // maximum length sequence
  kLss,  // linear sine sweep
  kEss,  // exponential sine sweep
};

// Sweep parameters. omega_start/omega_end are angular frequencies in
// radians/sample, 0 < w1 < w2 <= pi. For MLS, length must be 2^m - 1.
struct ExcitationSpec {
  ExcitationKind kind = ExcitationKind::kEss;
  std::size_t length = 1 << 16;
  double omega_start = 0.0;
  double omega_end = 0.0;
  double amplitude = 1.0;
  double fade_ms = 50.0;
  double sample_rate = 16000.0;
};

// +-amplitude pseudo-random sequence of length 2^order - 1 from a maximal
// length LFSR. Supported orders: 2..24, with one fixed primitive polynomial
// per order (see kMlsTaps in the implementation).
AudioSignal GenerateMls(int order, double sample_rate = 16000.0,
                        double amplitude = 1.0);

// s[n] = V sin(w1 n + ((w2-w1)/L) n^2/2), raised-cosine fades applied.
AudioSignal GenerateLss(const ExcitationSpec& spec);

// s[n] = V sin[(w1 L/ln(w2/w1)) (e^{(n/L) ln(w2/w1)} - 1)], fades applied.
AudioSignal GenerateEss(const ExcitationSpec& spec);

AudioSignal GenerateExcitation(const ExcitationSpec& spec);

// Raised-cosine fade-in/out ramps of fade_ms each; the interior is untouched
// and first/last samples become exactly zero.
AudioSignal ApplyFades(const AudioSignal& signal, double fade_ms);

// Fixed LFSR feedback taps (1-indexed stage numbers) for a given order.
// Exposed so the tests can drive an independent step-by-step oracle from the
// same polynomial table.
const std::uint32_t* MlsTaps(int order, int* n_taps);

}  // namespace dsr

#endif  // DSR_EXCITATION_H_
