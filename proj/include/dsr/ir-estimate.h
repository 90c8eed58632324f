// dsr/ir-estimate.h

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

#ifndef DSR_IR_ESTIMATE_H_
#define DSR_IR_ESTIMATE_H_

#include <cstddef>

#include "dsr/audio.h"
#include "dsr/excitation.h"
#include "dsr/room.h"

namespace dsr {

// +3 dB/octave whitening: frequency-domain magnitude ramp proportional to
// sqrt(f), unity gain at the geometric mean of [f_lo, f_hi] and clamped to
// the band edges outside it.
AudioSignal WhitenPinkSpectrum(const AudioSignal& signal, double f_lo_hz,
                               double f_hi_hz);

// Number of samples kept before the located linear-response peak, so the
// direct-path onset survives the causal trim.
inline constexpr std::size_t kIrTrimPrefix = 64;

// Recovers an impulse response from a recording of the excitation played
// through the channel: cross-correlation normalized by the excitation energy,
// trimmed to ir_length samples starting kIrTrimPrefix before the peak. For
// ESS, both signals are first passed through the +3 dB/octave whitening ramp
// (the sweep band is read off the excitation spectrum), which equalizes the
// pink sweep spectrum and pushes harmonic-distortion products strictly before
// the linear peak where the trim discards them.
ImpulseResponse EstimateIr(const AudioSignal& excitation,
                           const AudioSignal& recording, ExcitationKind kind,
                           std::size_t ir_length);

// Peak normalized correlation between two impulse responses, maximized over
// the alignment that matches their strongest taps. Used as the recovery
// quality metric.
double IrRecoveryCorrelation(const ImpulseResponse& estimated,
                             const ImpulseResponse& truth);

}  // namespace dsr

#endif  // DSR_IR_ESTIMATE_H_
