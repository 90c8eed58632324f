// src/init.cc

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

#include "dsr/init.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace dsr {

void InitGlorot(Matrix* w, Rng* rng) {
  const double fan_in = static_cast<double>(w->cols());
  const double fan_out = static_cast<double>(w->rows());
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-a, a);
  for (double& v : w->values()) v = u(*rng);
}

namespace {

// Householder QR; returns the thin Q factor (n x m, n >= m) with the sign
// convention fixed by a positive R diagonal.
Matrix ThinQ(Matrix a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  std::vector<std::vector<double>> vs;
  vs.reserve(m);

  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> v(n, 0.0);
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i] = a(i, k);
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      vs.push_back(std::vector<double>(n, 0.0));
      continue;
    }
    const double alpha = a(k, k) >= 0.0 ? -norm : norm;
    v[k] -= alpha;
    double vnorm = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm += v[i] * v[i];
    vnorm = std::sqrt(vnorm);
    if (vnorm > 0.0) {
      for (std::size_t i = k; i < n; ++i) v[i] /= vnorm;
    }
    // apply the reflector to the remaining columns
    for (std::size_t j = k; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * a(i, j);
      for (std::size_t i = k; i < n; ++i) a(i, j) -= 2.0 * dot * v[i];
    }
    vs.push_back(std::move(v));
  }

  // accumulate Q = H_0 ... H_{m-1} applied to the thin identity
  Matrix q(n, m);
  for (std::size_t j = 0; j < m; ++j) q(j, j) = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const auto& v = vs[k];
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * q(i, j);
      for (std::size_t i = k; i < n; ++i) q(i, j) -= 2.0 * dot * v[i];
    }
  }
  // fix signs so R's diagonal is positive (makes the draw well defined)
  for (std::size_t j = 0; j < m; ++j) {
    if (a(j, j) < 0.0) {
      for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
  }
  return q;
}

}  // namespace

void InitOrthogonal(Matrix* w, Rng* rng) {
  const std::size_t r = w->rows();
  const std::size_t c = w->cols();
  std::normal_distribution<double> g(0.0, 1.0);
  const bool wide = c > r;
  const std::size_t n = std::max(r, c);
  const std::size_t m = std::min(r, c);
  Matrix a(n, m);
  for (double& v : a.values()) v = g(*rng);
  Matrix q = ThinQ(std::move(a));  // n x m with orthonormal columns
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      (*w)(i, j) = wide ? q(j, i) : q(i, j);
    }
  }
}

void FillBias(std::vector<double>* b, double value) {
  std::fill(b->begin(), b->end(), value);
}

}  // namespace dsr
