// src/audio.cc

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

#include "dsr/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dsr/common.h"

namespace dsr {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

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

template <typename T>
void WriteLe(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

std::string ReadTag(std::istream& in) {
  char tag[4];
  in.read(tag, 4);
  return std::string(tag, 4);
}

}  // namespace

void ValidateSignal(const AudioSignal& s, const std::string& what) {
  if (s.sample_rate <= 0.0) {
    throw ArgumentError(what + ": sample rate must be positive");
  }
  for (double v : s.samples) {
    if (!std::isfinite(v)) {
      throw ArgumentError(what + ": non-finite sample");
    }
  }
}

AudioSignal ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);

  if (ReadTag(in) != "RIFF") throw FormatError(path + ": not a RIFF file");
  ReadLe<std::uint32_t>(in);  // overall size, unused
  if (ReadTag(in) != "WAVE") throw FormatError(path + ": not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> data;

  while (in && in.peek() != EOF) {
    std::string tag = ReadTag(in);
    std::uint32_t size = ReadLe<std::uint32_t>(in);
    if (!in) break;
    if (tag == "fmt ") {
      format = ReadLe<std::uint16_t>(in);
      channels = ReadLe<std::uint16_t>(in);
      rate = ReadLe<std::uint32_t>(in);
      ReadLe<std::uint32_t>(in);  // byte rate
      ReadLe<std::uint16_t>(in);  // block align
      bits = ReadLe<std::uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      data.resize(size);
      in.read(data.data(), size);
      if (static_cast<std::uint32_t>(in.gcount()) != size) {
        throw FormatError(path + ": truncated data chunk");
      }
      if (size % 2 == 1) in.seekg(1, std::ios::cur);
    } else {
      in.seekg(size + (size % 2), std::ios::cur);
    }
  }

  if (!have_fmt || data.empty()) {
    throw FormatError(path + ": missing fmt or data chunk");
  }
  if (channels != 1) {
    throw FormatError(path + ": only mono supported, got " +
                      std::to_string(channels) + " channels");
  }

  AudioSignal out;
  out.sample_rate = static_cast<double>(rate);
  if (format == kFormatPcm && bits == 16) {
    std::size_t n = data.size() / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v = static_cast<std::int16_t>(
          static_cast<unsigned char>(data[2 * i]) |
          (static_cast<unsigned char>(data[2 * i + 1]) << 8));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == kFormatIeeeFloat && bits == 32) {
    std::size_t n = data.size() / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = static_cast<unsigned char>(data[4 * i]) |
                        (static_cast<unsigned char>(data[4 * i + 1]) << 8) |
                        (static_cast<unsigned char>(data[4 * i + 2]) << 16) |
                        (static_cast<unsigned char>(data[4 * i + 3]) << 24);
      float f;
      std::memcpy(&f, &u, 4);
      out.samples[i] = static_cast<double>(f);
    }
  } else {
    throw FormatError(path + ": unsupported codec (format=" +
                      std::to_string(format) + ", bits=" +
                      std::to_string(bits) + ")");
  }
  return out;
}

void WriteWav(const std::string& path, const AudioSignal& signal,
              WavCodec codec) {
  ValidateSignal(signal, "WriteWav");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot create " + path);

  const std::uint16_t bits = codec == WavCodec::kPcm16 ? 16 : 32;
  const std::uint16_t format =
      codec == WavCodec::kPcm16 ? kFormatPcm : kFormatIeeeFloat;
  const std::uint32_t rate = static_cast<std::uint32_t>(signal.sample_rate);
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(signal.samples.size() * bits / 8);

  out.write("RIFF", 4);
  WriteLe<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  WriteLe<std::uint32_t>(out, 16);
  WriteLe<std::uint16_t>(out, format);
  WriteLe<std::uint16_t>(out, 1);  // mono
  WriteLe<std::uint32_t>(out, rate);
  WriteLe<std::uint32_t>(out, rate * bits / 8);
  WriteLe<std::uint16_t>(out, bits / 8);
  WriteLe<std::uint16_t>(out, bits);
  out.write("data", 4);
  WriteLe<std::uint32_t>(out, data_size);

  if (codec == WavCodec::kPcm16) {
    for (double v : signal.samples) {
      double scaled = std::round(v * 32768.0);
      scaled = std::clamp(scaled, -32768.0, 32767.0);
      WriteLe<std::uint16_t>(
          out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
  } else {
    for (double v : signal.samples) {
      float f = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      WriteLe<std::uint32_t>(out, u);
    }
  }
  if (!out) throw FormatError("write failed: " + path);
}

}  // namespace dsr
