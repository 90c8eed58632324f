// tests/test-room.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dsr/common.h"
#include "dsr/room.h"

using namespace dsr;

namespace {

// Independent omnidirectional image-source oracle: classic enumeration that
// mirrors the SOURCE (not the microphone), accumulating rho^n/(4 pi l) taps.
std::vector<double> OmniImageSourceOracle(const RoomSpec& room,
                                          const Vec3& src, const Vec3& mic,
                                          double fs, int max_order) {
  std::vector<std::pair<std::size_t, double>> taps;
  const double lx = room.dimensions.x, ly = room.dimensions.y,
               lz = room.dimensions.z;
  for (int mx = -max_order; mx <= max_order; ++mx) {
    for (int my = -max_order; my <= max_order; ++my) {
      for (int mz = -max_order; mz <= max_order; ++mz) {
        for (int qx = 0; qx <= 1; ++qx) {
          for (int qy = 0; qy <= 1; ++qy) {
            for (int qz = 0; qz <= 1; ++qz) {
              int order = std::abs(2 * mx - qx) + std::abs(2 * my - qy) +
                          std::abs(2 * mz - qz);
              if (order > max_order) continue;
              const double ix = (1 - 2 * qx) * src.x + 2.0 * mx * lx;
              const double iy = (1 - 2 * qy) * src.y + 2.0 * my * ly;
              const double iz = (1 - 2 * qz) * src.z + 2.0 * mz * lz;
              const double dx = ix - mic.x, dy = iy - mic.y, dz = iz - mic.z;
              const double l = std::sqrt(dx * dx + dy * dy + dz * dz);
              double amp = std::pow(room.reflection[0], std::abs(mx - qx)) *
                           std::pow(room.reflection[1], std::abs(mx)) *
                           std::pow(room.reflection[2], std::abs(my - qy)) *
                           std::pow(room.reflection[3], std::abs(my)) *
                           std::pow(room.reflection[4], std::abs(mz - qz)) *
                           std::pow(room.reflection[5], std::abs(mz));
              amp /= 4.0 * M_PI * l;
              taps.emplace_back(
                  static_cast<std::size_t>(
                      std::lround(l / room.sound_speed * fs)),
                  amp);
            }
          }
        }
      }
    }
  }
  std::size_t max_idx = 0;
  for (auto& [i, a] : taps) max_idx = std::max(max_idx, i);
  std::vector<double> h(max_idx + 1, 0.0);
  for (auto& [i, a] : taps) h[i] += a;
  return h;
}

RoomSpec DefaultRoom() {
  RoomSpec room;
  room.dimensions = {6.0, 5.0, 3.0};
  room.reflection = {0.8, 0.8, 0.7, 0.7, 0.6, 0.6};
  return room;
}

// Exponentially decaying noise IR whose energy falls 60 dB in t60 seconds.
ImpulseResponse SyntheticDecayIr(double t60, double fs, std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  // energy e^{-2n/tau} falls 60 dB after t60*fs samples
  const double tau = 2.0 * t60 * fs / (60.0 / (10.0 / std::log(10.0)));
  const std::size_t n = static_cast<std::size_t>(1.5 * t60 * fs);
  ImpulseResponse ir;
  ir.signal.sample_rate = fs;
  ir.signal.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ir.signal.samples[i] = std::exp(-static_cast<double>(i) / tau) * g(rng);
  }
  ir.signal.samples[0] = 1.0;  // pin the direct tap
  return ir;
}

}  // namespace

TEST_CASE("directivity gain on axis is one") {
  Directivity d{3.0, 1.0, 0.01};
  CHECK(DirectivityGain(0.0, 0.0, d) == doctest::Approx(1.0));
}

TEST_CASE("directivity gain behind the source hits the epsilon floor") {
  Directivity d{3.0, 1.0, 0.01};
  CHECK(DirectivityGain(M_PI, 0.0, d) ==
        doctest::Approx(0.01 / 1.01).epsilon(1e-9));
}

TEST_CASE("directivity is monotone away from the axis") {
  Directivity d{3.0, 1.0, 0.01};
  double prev = 2.0;
  for (double t = 0.0; t <= M_PI; t += 0.05) {
    const double g = DirectivityGain(t, 0.0, d);
    CHECK(g <= prev + 1e-12);
    CHECK(g > 0.0);
    CHECK(g <= 1.0);
    prev = g;
  }
}

TEST_CASE("reflection attenuation closed forms") {
  CHECK(ReflectionAttenuation(1.0, 0, 0.5) ==
        doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
  CHECK(ReflectionAttenuation(2.0, 3, 0.0) == doctest::Approx(0.0));
  // rho=0.8, n=3, l=5 -> 0.512/(20 pi)
  CHECK(ReflectionAttenuation(5.0, 3, 0.8) ==
        doctest::Approx(0.512 / (20.0 * M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(ReflectionAttenuation(0.0, 1, 0.5), ArgumentError);
}

TEST_CASE("direct path only: tap position and amplitude") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {1.0, 2.5, 1.5};
  MicSpec mic;
  mic.position = {4.43, 2.5, 1.5};  // l = 3.43 m
  auto ir = SimulateIr(room, src, mic, 16000.0, 0);
  // tau = 3.43/343 = 0.01 s -> sample 160
  REQUIRE(ir.signal.samples.size() == 161);
  CHECK(ir.signal.samples[160] ==
        doctest::Approx(1.0 / (4.0 * M_PI * 3.43)).epsilon(1e-9));
  for (std::size_t i = 0; i < 160; ++i) CHECK(ir.signal.samples[i] == 0.0);
}

TEST_CASE("first order 2-D mirror geometry by hand") {
  // kill floor/ceiling with rho_z = 0 so only in-plane paths carry energy;
  // source/mic placed asymmetrically so all four wall paths have distinct
  // lengths
  RoomSpec room;
  room.dimensions = {4.0, 3.0, 2.0};
  room.reflection = {0.9, 0.9, 0.9, 0.9, 0.0, 0.0};
  SourceSpec src;
  src.position = {1.0, 0.8, 1.0};
  MicSpec mic;
  mic.position = {3.2, 2.1, 1.0};
  const double fs = 48000.0;
  auto ir = SimulateIr(room, src, mic, fs, 1);

  // direct + 4 in-plane first-order source images, enumerated by hand:
  // mirror (sx, sy) over each wall, path length = image-to-mic distance
  auto dist = [&](double ix, double iy) {
    const double dx = ix - mic.position.x;
    const double dy = iy - mic.position.y;
    return std::sqrt(dx * dx + dy * dy);
  };
  struct Expect {
    double length;
    double rho;
  };
  std::vector<Expect> expect = {
      {dist(1.0, 0.8), 1.0},    // direct
      {dist(-1.0, 0.8), 0.9},   // x=0 wall
      {dist(7.0, 0.8), 0.9},    // x=4 wall
      {dist(1.0, -0.8), 0.9},   // y=0 wall
      {dist(1.0, 5.2), 0.9},    // y=3 wall
  };
  const double c = 343.0;
  // z mirrors exist but carry rho=0 amplitude
  std::size_t nonzero = 0;
  for (double v : ir.signal.samples) nonzero += v != 0.0;
  CHECK(nonzero == 5);
  for (const auto& e : expect) {
    const auto idx = static_cast<std::size_t>(std::lround(e.length / c * fs));
    CHECK(ir.signal.samples[idx] ==
          doctest::Approx(e.rho / (4.0 * M_PI * e.length)).epsilon(1e-9));
  }
}

TEST_CASE("p=q=0 equals the omnidirectional image-source oracle tap for tap") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {1.2, 3.1, 1.7};
  src.azimuth = 0.7;  // orientation must not matter with p=q=0
  src.directivity = {0.0, 0.0, 0.01};
  MicSpec mic;
  mic.position = {4.9, 1.4, 2.1};
  const double fs = 16000.0;
  auto ir = SimulateIr(room, src, mic, fs, 3);
  auto ref = OmniImageSourceOracle(room, src.position, mic.position, fs, 3);

  // directivity floor (eps)/(1+eps) == 1 at p=q=0, so taps must match exactly
  REQUIRE(ir.signal.samples.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(ir.signal.samples[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("direct tap index matches round(fs l / c) for random geometries") {
  Rng rng = MakeRng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    RoomSpec room;
    room.dimensions = {3.0 + 5.0 * u(rng), 3.0 + 5.0 * u(rng),
                       2.2 + 2.0 * u(rng)};
    for (auto& r : room.reflection) r = 0.3 + 0.6 * u(rng);
    SourceSpec src;
    src.position = {0.3 + (room.dimensions.x - 0.6) * u(rng),
                    0.3 + (room.dimensions.y - 0.6) * u(rng),
                    0.3 + (room.dimensions.z - 0.6) * u(rng)};
    MicSpec mic;
    do {
      mic.position = {0.3 + (room.dimensions.x - 0.6) * u(rng),
                      0.3 + (room.dimensions.y - 0.6) * u(rng),
                      0.3 + (room.dimensions.z - 0.6) * u(rng)};
    } while (std::abs(mic.position.x - src.position.x) +
                 std::abs(mic.position.y - src.position.y) +
                 std::abs(mic.position.z - src.position.z) <
             0.5);
    const double fs = 16000.0;
    auto ir = SimulateIr(room, src, mic, fs, 1);
    const double dx = src.position.x - mic.position.x;
    const double dy = src.position.y - mic.position.y;
    const double dz = src.position.z - mic.position.z;
    const double l = std::sqrt(dx * dx + dy * dy + dz * dz);
    const auto expect = std::lround(fs * l / room.sound_speed);
    const auto got = static_cast<long>(DirectPathDelaySamples(ir));
    CHECK(std::abs(got - expect) <= 1);
  }
}

TEST_CASE("rotating a directional source away never raises the direct tap") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {2.0, 2.5, 1.5};
  src.directivity = {3.0, 1.0, 0.01};
  MicSpec mic;
  mic.position = {5.0, 2.5, 1.5};  // on-axis direction is azimuth 0
  double on_axis = 0.0;
  for (double az = 0.0; az <= M_PI + 1e-9; az += M_PI / 8) {
    src.azimuth = az;
    auto ir = SimulateIr(room, src, mic, 16000.0, 0);
    const double amp = ir.signal.samples[DirectPathDelaySamples(ir)];
    if (az == 0.0) {
      on_axis = amp;
    } else {
      CHECK(amp <= on_axis + 1e-15);
    }
  }
}

TEST_CASE("total energy is non-increasing in every reflection reduction") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {1.5, 1.5, 1.5};
  MicSpec mic;
  mic.position = {4.0, 3.5, 1.8};
  auto energy = [&](const RoomSpec& r) {
    auto ir = SimulateIr(r, src, mic, 16000.0, 4);
    double e = 0.0;
    for (double v : ir.signal.samples) e += v * v;
    return e;
  };
  const double base = energy(room);
  for (int wall = 0; wall < 6; ++wall) {
    RoomSpec damped = room;
    damped.reflection[wall] *= 0.5;
    CHECK(energy(damped) <= base + 1e-15);
  }
}

TEST_CASE("coincident source and mic is an error") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {2.0, 2.0, 1.5};
  MicSpec mic;
  mic.position = {2.0, 2.0, 1.5};
  CHECK_THROWS_AS(SimulateIr(room, src, mic, 16000.0, 1), ArgumentError);
}

TEST_CASE("t60 estimate recovers constructed decays within 10 percent") {
  for (double t60 : {0.25, 0.5, 0.7, 1.0}) {
    auto ir = SyntheticDecayIr(t60, 16000.0, 99);
    const double est = EstimateT60(ir);
    CHECK(std::abs(est - t60) / t60 < 0.10);
  }
}

TEST_CASE("t60 estimate is scale invariant") {
  auto ir = SyntheticDecayIr(0.5, 16000.0, 100);
  const double e1 = EstimateT60(ir);
  for (auto& v : ir.signal.samples) v *= 37.5;
  const double e2 = EstimateT60(ir);
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("t60 estimation fails on degenerate input") {
  ImpulseResponse single;
  single.signal.sample_rate = 16000.0;
  single.signal.samples = {1.0};
  CHECK_THROWS_AS(EstimateT60(single), NumericError);

  ImpulseResponse spike;
  spike.signal.sample_rate = 16000.0;
  spike.signal.samples.assign(100, 0.0);
  spike.signal.samples[3] = 1.0;
  CHECK_THROWS_AS(EstimateT60(spike), NumericError);
}

TEST_CASE("drr of a single tap is the infinite sentinel") {
  ImpulseResponse ir;
  ir.signal.sample_rate = 16000.0;
  ir.signal.samples.assign(10, 0.0);
  ir.signal.samples[2] = 0.5;
  auto drr = EstimateDrr(ir);
  CHECK_FALSE(drr.finite);
  CHECK(std::isinf(drr.db));
}

TEST_CASE("drr of two equal far-apart taps is 0 dB") {
  ImpulseResponse ir;
  ir.signal.sample_rate = 16000.0;
  ir.signal.samples.assign(1000, 0.0);
  ir.signal.samples[10] = 0.7;
  ir.signal.samples[900] = 0.7;
  auto drr = EstimateDrr(ir, 2.0);
  REQUIRE(drr.finite);
  CHECK(drr.db == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("drr decreases with source-microphone distance") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {1.0, 2.5, 1.5};
  double prev = std::numeric_limits<double>::infinity();
  for (double d = 1.0; d <= 4.0; d += 1.0) {
    MicSpec mic;
    mic.position = {1.0 + d, 2.5, 1.5};
    auto ir = SimulateIr(room, src, mic, 16000.0, 6);
    auto drr = EstimateDrr(ir, 2.0);
    REQUIRE(drr.finite);
    CHECK(drr.db < prev);
    prev = drr.db;
  }
}

TEST_CASE("default max order pushes the tail under -60 dB") {
  RoomSpec room = DefaultRoom();
  SourceSpec src;
  src.position = {1.0, 2.5, 1.5};
  MicSpec mic;
  mic.position = {4.0, 2.0, 1.5};
  const int order = DefaultMaxOrder(room, src, mic);
  CHECK(order >= 4);
  CHECK(order <= 64);
}
