// src/feature-io.cc

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

#include "dsr/feature-io.h"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "dsr/common.h"

namespace dsr {

namespace {

constexpr std::uint32_t kVersion = 1;

template <typename T>
void WriteLe(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T ReadLe(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(buf[i]) << (8 * i);
  }
  return v;
}

void WriteF32(std::ostream& out, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  WriteLe<std::uint32_t>(out, u);
}

float ReadF32(std::istream& in) {
  const std::uint32_t u = ReadLe<std::uint32_t>(in);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

void WriteFeatures(const std::string& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot create " + path);
  out.write("DSRF", 4);
  WriteLe<std::uint32_t>(out, kVersion);
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(features.frames));
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(features.dims));
  WriteF32(out, static_cast<float>(features.frame_shift_ms));
  for (double v : features.values) WriteF32(out, static_cast<float>(v));
  if (!out) throw FormatError("write failed: " + path);
}

FeatureMatrix ReadFeatures(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DSRF", 4) != 0) {
    throw FormatError(path + ": not a DSRF feature file");
  }
  const std::uint32_t version = ReadLe<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError(path + ": unsupported DSRF version " +
                      std::to_string(version));
  }
  FeatureMatrix f;
  f.frames = ReadLe<std::uint32_t>(in);
  f.dims = ReadLe<std::uint32_t>(in);
  f.frame_shift_ms = static_cast<double>(ReadF32(in));
  f.values.resize(f.frames * f.dims);
  for (double& v : f.values) v = static_cast<double>(ReadF32(in));
  if (!in) throw FormatError(path + ": truncated DSRF file");
  return f;
}

}  // namespace dsr
