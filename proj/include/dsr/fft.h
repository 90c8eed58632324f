// dsr/fft.h

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

#ifndef DSR_FFT_H_
#define DSR_FFT_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace dsr {

// In-place iterative radix-2 FFT. a.size() must be a power of two.
// The inverse transform includes the 1/N normalization.
void Fft(std::vector<std::complex<double>>* a, bool inverse);

// Smallest power of two >= n (and >= 1).
std::size_t NextPow2(std::size_t n);

// |X[k]|^2 for k = 0..nfft/2 of the zero-padded input (one-sided).
std::vector<double> PowerSpectrum(const std::vector<double>& frame,
                                  std::size_t nfft);

}  // namespace dsr

#endif  // DSR_FFT_H_
