// dsr/common.h

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

#ifndef DSR_COMMON_H_
#define DSR_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace dsr {

// Invalid arguments or configuration (CLI exit code 1).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable, malformed or unsupported data files (CLI exit code 2).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimation or verification failures: no usable decay range, undefined
// correlation, gradient check above threshold (CLI exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All randomness in the library flows through explicitly seeded generators;
// nothing reads the wall clock.
using Rng = std::mt19937_64;

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

}  // namespace dsr

#endif  // DSR_COMMON_H_
