// src/checkpoint.cc

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

#include "dsr/checkpoint.h"

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

}  // namespace

void SaveCheckpoint(const std::string& path, const nlohmann::json& header,
                    const ParamSet& params) {
  nlohmann::json full = header;
  full["params"] = nlohmann::json::array();
  for (const auto& p : params) {
    full["params"].push_back({{"name", p.name}, {"size", p.size}});
  }
  const std::string head = full.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot create " + path);
  out.write("DSRM", 4);
  WriteLe<std::uint32_t>(out, kVersion);
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(head.size()));
  out.write(head.data(), head.size());
  for (const auto& p : params) {
    for (std::size_t i = 0; i < p.size; ++i) {
      const float f = static_cast<float>(p.value[i]);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      WriteLe<std::uint32_t>(out, u);
    }
  }
  if (!out) throw FormatError("write failed: " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DSRM", 4) != 0) {
    throw FormatError(path + ": not a DSRM checkpoint");
  }
  const std::uint32_t version = ReadLe<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError(path + ": unsupported DSRM version " +
                      std::to_string(version));
  }
  const std::uint32_t head_len = ReadLe<std::uint32_t>(in);
  std::string head(head_len, '\0');
  in.read(head.data(), head_len);
  if (!in) throw FormatError(path + ": truncated header");

  Checkpoint cp;
  try {
    cp.header = nlohmann::json::parse(head);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": bad header JSON: " + e.what());
  }
  if (!cp.header.contains("params") || !cp.header["params"].is_array()) {
    throw FormatError(path + ": header lacks a params table");
  }
  for (const auto& entry : cp.header["params"]) {
    const std::string name = entry.at("name").get<std::string>();
    const std::size_t size = entry.at("size").get<std::size_t>();
    std::vector<double> values(size);
    for (std::size_t i = 0; i < size; ++i) {
      const std::uint32_t u = ReadLe<std::uint32_t>(in);
      float f;
      std::memcpy(&f, &u, 4);
      values[i] = static_cast<double>(f);
    }
    cp.blobs.emplace_back(name, std::move(values));
  }
  if (!in) throw FormatError(path + ": truncated parameter blobs");
  return cp;
}

void RestoreParams(const Checkpoint& checkpoint, const ParamSet& params) {
  if (checkpoint.blobs.size() != params.size()) {
    throw FormatError("RestoreParams: parameter count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, values] = checkpoint.blobs[i];
    if (name != params[i].name || values.size() != params[i].size) {
      throw FormatError("RestoreParams: mismatch at " + params[i].name);
    }
    std::copy(values.begin(), values.end(), params[i].value);
  }
}

}  // namespace dsr
