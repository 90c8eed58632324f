// src/room.cc

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

#include "dsr/room.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dsr/common.h"

namespace dsr {

namespace {

double Norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

Vec3 Sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

Vec3 OrientationVector(double azimuth, double elevation) {
  return {std::cos(elevation) * std::cos(azimuth),
          std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
}

double WrapAngle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

void ValidateGeometry(const RoomSpec& room, const SourceSpec& source,
                      const MicSpec& mic) {
  if (room.dimensions.x <= 0.0 || room.dimensions.y <= 0.0 ||
      room.dimensions.z <= 0.0) {
    throw ArgumentError("SimulateIr: room dimensions must be positive");
  }
  for (double rho : room.reflection) {
    if (rho < 0.0 || rho > 1.0) {
      throw ArgumentError("SimulateIr: reflection coefficients must be in [0,1]");
    }
  }
  if (room.sound_speed <= 0.0) {
    throw ArgumentError("SimulateIr: sound speed must be positive");
  }
  auto inside = [&room](const Vec3& p) {
    return p.x > 0.0 && p.x < room.dimensions.x && p.y > 0.0 &&
           p.y < room.dimensions.y && p.z > 0.0 && p.z < room.dimensions.z;
  };
  if (!inside(source.position)) {
    throw ArgumentError("SimulateIr: source outside room");
  }
  if (!inside(mic.position)) {
    throw ArgumentError("SimulateIr: microphone outside room");
  }
  if (source.directivity.p < 0.0 || source.directivity.q < 0.0 ||
      source.directivity.epsilon <= 0.0) {
    throw ArgumentError("SimulateIr: invalid directivity parameters");
  }
  if (Norm(Sub(source.position, mic.position)) == 0.0) {
    throw ArgumentError("SimulateIr: source and microphone coincide");
  }
}

double MicGain(const MicSpec& mic, const Vec3& arrival_dir) {
  if (mic.pattern == MicPattern::kOmnidirectional) return 1.0;
  const Vec3 o = OrientationVector(mic.azimuth, mic.elevation);
  const double c = o.x * arrival_dir.x + o.y * arrival_dir.y + o.z * arrival_dir.z;
  return 0.5 + 0.5 * c;  // cardioid
}

}  // namespace

double DirectivityGain(double theta, double phi, const Directivity& d) {
  if (d.epsilon <= 0.0) {
    throw ArgumentError("DirectivityGain: epsilon must be positive");
  }
  const double d_az = std::pow((1.0 + std::cos(theta)) / 2.0, d.p);
  const double d_el = std::pow((1.0 + std::cos(phi)) / 2.0, d.q);
  return (d_az * d_el + d.epsilon) / (1.0 + d.epsilon);
}

double ReflectionAttenuation(double path_length_m, int n_reflections,
                             double rho) {
  if (path_length_m <= 0.0) {
    throw ArgumentError("ReflectionAttenuation: path length must be positive");
  }
  if (n_reflections < 0) {
    throw ArgumentError("ReflectionAttenuation: negative reflection count");
  }
  return std::pow(rho, n_reflections) / (4.0 * M_PI * path_length_m);
}

ImpulseResponse SimulateIr(const RoomSpec& room, const SourceSpec& source,
                           const MicSpec& mic, double sample_rate,
                           int max_order) {
  ValidateGeometry(room, source, mic);
  if (sample_rate <= 0.0) {
    throw ArgumentError("SimulateIr: sample rate must be positive");
  }
  if (max_order < 0) {
    throw ArgumentError("SimulateIr: max_order must be >= 0");
  }

  const Vec3& s = source.position;
  const Vec3& m = mic.position;
  const double lx = room.dimensions.x;
  const double ly = room.dimensions.y;
  const double lz = room.dimensions.z;
  const Vec3 axis = OrientationVector(source.azimuth, source.elevation);
  const double src_az = std::atan2(axis.y, axis.x);
  const double src_el = std::asin(std::clamp(axis.z, -1.0, 1.0));

  struct Tap {
    std::size_t index;
    double amplitude;
  };
  std::vector<Tap> taps;

  // Mirror lattice of the microphone: per axis, position (1-2q) M + 2 m L,
  // |m-q| hits on the low wall, |m| on the high wall. A path's order is its
  // total wall-hit count.
  for (int mx = -max_order; mx <= max_order; ++mx) {
    for (int my = -max_order; my <= max_order; ++my) {
      for (int mz = -max_order; mz <= max_order; ++mz) {
        for (int qx = 0; qx <= 1; ++qx) {
          for (int qy = 0; qy <= 1; ++qy) {
            for (int qz = 0; qz <= 1; ++qz) {
              const int order = std::abs(2 * mx - qx) + std::abs(2 * my - qy) +
                                std::abs(2 * mz - qz);
              if (order > max_order) continue;

              const Vec3 mic_img = {(1 - 2 * qx) * m.x + 2.0 * mx * lx,
                                    (1 - 2 * qy) * m.y + 2.0 * my * ly,
                                    (1 - 2 * qz) * m.z + 2.0 * mz * lz};
              const Vec3 d = Sub(mic_img, s);
              const double len = Norm(d);
              if (len == 0.0) continue;

              double amp = std::pow(room.reflection[0], std::abs(mx - qx)) *
                           std::pow(room.reflection[1], std::abs(mx)) *
                           std::pow(room.reflection[2], std::abs(my - qy)) *
                           std::pow(room.reflection[3], std::abs(my)) *
                           std::pow(room.reflection[4], std::abs(mz - qz)) *
                           std::pow(room.reflection[5], std::abs(mz));
              amp /= 4.0 * M_PI * len;

              // departure direction at the real source
              const Vec3 u = {d.x / len, d.y / len, d.z / len};
              const double dep_az = std::atan2(u.y, u.x);
              const double dep_el = std::asin(std::clamp(u.z, -1.0, 1.0));
              amp *= DirectivityGain(WrapAngle(dep_az - src_az),
                                     dep_el - src_el, source.directivity);

              if (mic.pattern != MicPattern::kOmnidirectional) {
                // image source of the same path: per axis (1-2q) S + 2 m' L
                // with m' = m when q = 1 and m' = -m when q = 0
                const Vec3 src_img = {
                    (1 - 2 * qx) * s.x + 2.0 * (qx ? mx : -mx) * lx,
                    (1 - 2 * qy) * s.y + 2.0 * (qy ? my : -my) * ly,
                    (1 - 2 * qz) * s.z + 2.0 * (qz ? mz : -mz) * lz};
                const Vec3 a = Sub(src_img, m);
                const double alen = Norm(a);
                amp *= MicGain(mic, {a.x / alen, a.y / alen, a.z / alen});
              }

              const double tau = len / room.sound_speed;
              taps.push_back(
                  {static_cast<std::size_t>(std::lround(tau * sample_rate)),
                   amp});
            }
          }
        }
      }
    }
  }

  std::size_t max_index = 0;
  for (const Tap& t : taps) max_index = std::max(max_index, t.index);

  ImpulseResponse ir;
  ir.signal.sample_rate = sample_rate;
  ir.signal.samples.assign(max_index + 1, 0.0);
  for (const Tap& t : taps) ir.signal.samples[t.index] += t.amplitude;
  ir.max_reflection_order = max_order;
  ir.source = source;
  ir.mic = mic;
  return ir;
}

int DefaultMaxOrder(const RoomSpec& room, const SourceSpec& source,
                    const MicSpec& mic) {
  ValidateGeometry(room, source, mic);
  const double rho_max =
      *std::max_element(room.reflection.begin(), room.reflection.end());
  if (rho_max == 0.0) return 0;
  const double l_direct = Norm(Sub(source.position, mic.position));
  const double min_dim = std::min({room.dimensions.x, room.dimensions.y,
                                   room.dimensions.z});
  // last-order amplitude  ~ rho^n / (4 pi n min_dim); direct ~ 1 / (4 pi l)
  for (int n = 1; n < 64; ++n) {
    const double ratio = std::pow(rho_max, n) * l_direct / (n * min_dim);
    if (ratio <= 1e-3) return n;
  }
  return 64;
}

std::size_t DirectPathDelaySamples(const ImpulseResponse& ir) {
  const auto& h = ir.signal.samples;
  if (h.empty()) throw ArgumentError("DirectPathDelaySamples: empty IR");
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i]) > std::abs(h[best])) best = i;
  }
  return best;
}

double EstimateT60(const ImpulseResponse& ir) {
  const auto& h = ir.signal.samples;
  if (h.size() < 2) throw NumericError("EstimateT60: degenerate IR");

  // Schroeder backward integration from the strongest tap.
  const std::size_t start = DirectPathDelaySamples(ir);
  const std::size_t n = h.size() - start;
  std::vector<double> edc(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double v = h[start + i];
    acc += v * v;
    edc[i] = acc;
  }
  if (edc[0] <= 0.0) throw NumericError("EstimateT60: zero-energy IR");

  // least squares on the -5..-35 dB span of the decay curve
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (edc[i] <= 0.0) break;
    const double db = 10.0 * std::log10(edc[i] / edc[0]);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    const double t = static_cast<double>(i) / ir.signal.sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (count < 8) {
    throw NumericError("EstimateT60: insufficient decay range for the fit");
  }
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) throw NumericError("EstimateT60: degenerate fit");
  const double slope = (count * sxy - sx * sy) / denom;  // dB per second
  if (slope >= 0.0) throw NumericError("EstimateT60: no decay detected");
  return -60.0 / slope;
}

DrrEstimate EstimateDrr(const ImpulseResponse& ir, double direct_window_ms) {
  const auto& h = ir.signal.samples;
  if (h.empty()) throw ArgumentError("EstimateDrr: empty IR");
  const std::size_t peak = DirectPathDelaySamples(ir);
  const std::size_t half = static_cast<std::size_t>(
      std::lround(direct_window_ms / 2.0 * ir.signal.sample_rate / 1000.0));
  const std::size_t lo = peak > half ? peak - half : 0;
  const std::size_t hi = std::min(h.size() - 1, peak + half);

  double e_direct = 0.0, e_total = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double e = h[i] * h[i];
    e_total += e;
    if (i >= lo && i <= hi) e_direct += e;
  }
  const double e_rev = e_total - e_direct;
  DrrEstimate out;
  if (e_rev <= 0.0) {
    out.finite = false;
    out.db = std::numeric_limits<double>::infinity();
    return out;
  }
  out.db = 10.0 * std::log10(e_direct / e_rev);
  return out;
}

IrMetrics ComputeIrMetrics(const ImpulseResponse& ir, double direct_window_ms) {
  IrMetrics m;
  m.direct_path_delay_samples = DirectPathDelaySamples(ir);
  m.drr = EstimateDrr(ir, direct_window_ms);
  m.t60_seconds = EstimateT60(ir);
  return m;
}

}  // namespace dsr
