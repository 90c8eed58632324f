// dsr/audio.h

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

#ifndef DSR_AUDIO_H_
#define DSR_AUDIO_H_

#include <cstddef>
#include <string>
#include <vector>

namespace dsr {

// A mono sampled waveform. Samples are dimensionless amplitudes, finite by
// construction of every producer in this library; sample_rate is in Hz.
struct AudioSignal {
  std::vector<double> samples;
  double sample_rate = 16000.0;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws ArgumentError if the signal violates its invariants (non-positive
// rate, non-finite sample).
void ValidateSignal(const AudioSignal& s, const std::string& what);

enum class WavCodec {
  kPcm16,    // PCM 16-bit signed little-endian
  kFloat32,  // IEEE float32
};

// RIFF/WAVE reader. Mono PCM16 and IEEE float32 only; PCM samples are
// normalized to [-1, 1) by dividing by 32768. Anything else is a FormatError.
AudioSignal ReadWav(const std::string& path);

void WriteWav(const std::string& path, const AudioSignal& signal,
              WavCodec codec = WavCodec::kFloat32);

}  // namespace dsr

#endif  // DSR_AUDIO_H_
