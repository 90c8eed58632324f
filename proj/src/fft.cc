// src/fft.cc

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

#include "dsr/fft.h"

#include <cmath>

#include "dsr/common.h"

namespace dsr {

void Fft(std::vector<std::complex<double>>* a, bool inverse) {
  const std::size_t n = a->size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0) {
    throw ArgumentError("Fft: size must be a power of two");
  }
  auto& v = *a;

  // bit reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = v[i + k];
        std::complex<double> t = v[i + k + len / 2] * w;
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : v) x /= static_cast<double>(n);
  }
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> PowerSpectrum(const std::vector<double>& frame,
                                  std::size_t nfft) {
  if ((nfft & (nfft - 1)) != 0 || nfft == 0) {
    throw ArgumentError("PowerSpectrum: nfft must be a power of two");
  }
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  const std::size_t n = std::min(frame.size(), nfft);
  for (std::size_t i = 0; i < n; ++i) buf[i] = frame[i];
  Fft(&buf, false);
  std::vector<double> p(nfft / 2 + 1);
  for (std::size_t k = 0; k <= nfft / 2; ++k) p[k] = std::norm(buf[k]);
  return p;
}

}  // namespace dsr
