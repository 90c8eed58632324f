// dsr/room.h

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

#ifndef DSR_ROOM_H_
#define DSR_ROOM_H_

#include <array>
#include <cstddef>

#include "dsr/audio.h"

namespace dsr {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Shoebox room. reflection holds one coefficient per surface, in the order
// {x=0, x=Lx, y=0, y=Ly, z=0, z=Lz}, each in [0, 1].
struct RoomSpec {
  Vec3 dimensions;
  std::array<double, 6> reflection{};
  double sound_speed = 343.0;
};

// Source directivity of the directional image method:
//   D_az(theta) = ((1+cos theta)/2)^p
//   D_el(phi)   = ((1+cos phi)/2)^q
//   D_tot       = (D_az * D_el + eps) / (1 + eps)
// p = q = 0 makes the source omnidirectional.
struct Directivity {
  double p = 0.0;
  double q = 0.0;
  double epsilon = 0.01;
};

struct SourceSpec {
  Vec3 position;
  double azimuth = 0.0;    // radians
  double elevation = 0.0;  // radians
  Directivity directivity;
};

enum class MicPattern {
  kOmnidirectional,
  kCardioid,
};

struct MicSpec {
  Vec3 position;
  MicPattern pattern = MicPattern::kOmnidirectional;
  double azimuth = 0.0;
  double elevation = 0.0;
};

// A simulated or measured room impulse response. max_reflection_order is -1
// for measured responses.
struct ImpulseResponse {
  AudioSignal signal;
  int max_reflection_order = -1;
  SourceSpec source;
  MicSpec mic;
};

struct DrrEstimate {
  double db = 0.0;
  bool finite = true;  // false when the reverberant part has zero energy
};

struct IrMetrics {
  double t60_seconds = 0.0;
  DrrEstimate drr;
  std::size_t direct_path_delay_samples = 0;
};

// D_tot for the given angular offsets from the source axis. Total function,
// value in (0, 1].
double DirectivityGain(double theta, double phi, const Directivity& d);

// alpha = rho^n / (4 pi l).
double ReflectionAttenuation(double path_length_m, int n_reflections,
                             double rho);

// Directional image method over the 3-D mirror lattice, bounded by max_order
// total wall hits per path. The microphone is mirrored rather than the
// source, so each path keeps its true departure direction at the source and
// the source directivity can be applied per path. Taps are placed by rounding
// tau * fs to the nearest sample.
ImpulseResponse SimulateIr(const RoomSpec& room, const SourceSpec& source,
                           const MicSpec& mic, double sample_rate,
                           int max_order);

// Smallest order whose contribution falls 60 dB below the direct tap; used
// when a caller does not pin the order explicitly.
int DefaultMaxOrder(const RoomSpec& room, const SourceSpec& source,
                    const MicSpec& mic);

// Backward-integrated energy decay, least-squares fit of the -5..-35 dB span,
// extrapolated to -60 dB.
double EstimateT60(const ImpulseResponse& ir);

// 10 log10(E_direct / E_reverberant), direct energy summed over a window of
// +-direct_window_ms/2 around the strongest tap.
DrrEstimate EstimateDrr(const ImpulseResponse& ir,
                        double direct_window_ms = 2.0);

std::size_t DirectPathDelaySamples(const ImpulseResponse& ir);

IrMetrics ComputeIrMetrics(const ImpulseResponse& ir,
                           double direct_window_ms = 2.0);

}  // namespace dsr

#endif  // DSR_ROOM_H_
