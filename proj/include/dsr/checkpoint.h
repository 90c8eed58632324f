// dsr/checkpoint.h

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

#ifndef DSR_CHECKPOINT_H_
#define DSR_CHECKPOINT_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "dsr/layers.h"

namespace dsr {

// Model checkpoint, little endian:
//   magic "DSRM", u32 version, u32 header_length, header JSON (topology,
//   shapes, seeds, parameter table), then float32 parameter blobs in the
//   order declared by the header's "params" array.
struct Checkpoint {
  nlohmann::json header;
  std::vector<std::pair<std::string, std::vector<double>>> blobs;
};

void SaveCheckpoint(const std::string& path, const nlohmann::json& header,
                    const ParamSet& params);

Checkpoint LoadCheckpoint(const std::string& path);

// Copies blob values into a matching ParamSet (names and sizes must agree).
void RestoreParams(const Checkpoint& checkpoint, const ParamSet& params);

}  // namespace dsr

#endif  // DSR_CHECKPOINT_H_
