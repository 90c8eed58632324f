// dsr/feature-io.h

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

#ifndef DSR_FEATURE_IO_H_
#define DSR_FEATURE_IO_H_

#include <string>

#include "dsr/features.h"

namespace dsr {

// Binary feature file, little endian:
//   magic "DSRF", u32 version, u32 frames, u32 dims, f32 frame_shift_ms,
//   then frames*dims float32 values, row major.
void WriteFeatures(const std::string& path, const FeatureMatrix& features);
FeatureMatrix ReadFeatures(const std::string& path);

}  // namespace dsr

#endif  // DSR_FEATURE_IO_H_
