// dsr/signal-ops.h

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

#ifndef DSR_SIGNAL_OPS_H_
#define DSR_SIGNAL_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dsr/audio.h"

namespace dsr {

// Whether a contamination convolution keeps the full tail (len(x)+len(h)-1)
// or is truncated back to the clean-signal length.
enum class ConvTail {
  kFull,
  kTrimToInput,
};

// Linear convolution, direct O(N*M) summation. Reference path; also the
// oracle partner of the transform-based path below (they must agree to 1e-9).
std::vector<double> ConvolveDirect(std::span<const double> x,
                                   std::span<const double> h);

// Linear convolution through zero-padded FFTs.
std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h);

// y[n] = sum_m x[n-m] h[m]. Picks the direct path for small inputs and the
// transform path once the direct work exceeds a fixed threshold.
AudioSignal Convolve(const AudioSignal& x, std::span<const double> h,
                     ConvTail tail = ConvTail::kFull);

// R[n] = sum_l s[l] * y[l+n] for n in [-max_lag, max_lag], zero-padded at the
// edges. Result index i corresponds to lag i - max_lag.
std::vector<double> CrossCorrelate(const AudioSignal& s, const AudioSignal& y,
                                   std::size_t max_lag);

enum class WindowKind {
  kRectangular,
  kHamming,
};

// w[k] = 0.54 - 0.46 cos(2 pi k / (K-1)) for Hamming; all-ones otherwise.
std::vector<double> MakeWindow(WindowKind kind, std::size_t length);

struct FrameSet {
  std::vector<std::vector<double>> frames;
  std::size_t frame_length = 0;
  std::size_t frame_shift = 0;
  WindowKind window = WindowKind::kRectangular;
};

// Splits x into overlapping windowed frames. A signal shorter than one frame
// yields an empty FrameSet. Frame count = floor((len - flen)/shift) + 1.
FrameSet FrameSignal(const AudioSignal& x, double frame_ms = 25.0,
                     double shift_ms = 10.0,
                     WindowKind window = WindowKind::kHamming);

// clean + g * noise with g chosen so that the ratio of mean powers over the
// clean extent equals snr_db. Noise shorter than clean is tiled cyclically,
// longer noise is trimmed.
AudioSignal MixAtSnr(const AudioSignal& clean, const AudioSignal& noise,
                     double snr_db);

}  // namespace dsr

#endif  // DSR_SIGNAL_OPS_H_
