// dsr/init.h

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

#ifndef DSR_INIT_H_
#define DSR_INIT_H_

#include <vector>

#include "dsr/common.h"
#include "dsr/matrix.h"

namespace dsr {

// Uniform Glorot: variance 2 / (fan_in + fan_out), rows are fan_out.
void InitGlorot(Matrix* w, Rng* rng);

// Orthogonal rows/columns via Householder QR of a Gaussian matrix;
// Q^T Q = I to well below 1e-9.
void InitOrthogonal(Matrix* w, Rng* rng);

// Constant fill, e.g. the small positive 0.1 used for ReLU biases.
void FillBias(std::vector<double>* b, double value);

}  // namespace dsr

#endif  // DSR_INIT_H_
