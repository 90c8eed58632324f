// src/matrix.cc

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

#include "dsr/matrix.h"

#include <algorithm>

#include "dsr/common.h"

namespace dsr {

namespace {

void CheckSameShape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

Matrix& Matrix::operator+=(const Matrix& o) {
  CheckSameShape(*this, o, "Matrix +=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  CheckSameShape(*this, o, "Matrix -=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("MatMul: inner dim mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

Matrix MatMulTN(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ArgumentError("MatMulTN: dim mismatch");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aki * b(k, j);
      }
    }
  }
  return c;
}

Matrix MatMulNT(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ArgumentError("MatMulNT: dim mismatch");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        acc += a(i, k) * b(j, k);
      }
      c(i, j) = acc;
    }
  }
  return c;
}

Matrix AffineForward(const Matrix& x, const Matrix& w,
                     const std::vector<double>& b) {
  if (x.cols() != w.cols()) {
    throw ArgumentError("AffineForward: input dim mismatch");
  }
  if (!b.empty() && b.size() != w.rows()) {
    throw ArgumentError("AffineForward: bias dim mismatch");
  }
  Matrix y = MatMulNT(x, w);
  if (!b.empty()) {
    for (std::size_t i = 0; i < y.rows(); ++i) {
      for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += b[j];
    }
  }
  return y;
}

Matrix Hadamard(const Matrix& a, const Matrix& b) {
  CheckSameShape(a, b, "Hadamard");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.values()[i] *= b.values()[i];
  }
  return c;
}

Matrix Transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

std::vector<double> ColumnSums(const Matrix& a) {
  std::vector<double> s(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) s[j] += a(i, j);
  }
  return s;
}

Matrix ConcatCols(const Matrix& a, const Matrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.rows() != b.rows()) throw ArgumentError("ConcatCols: row mismatch");
  Matrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
  }
  return c;
}

Matrix SliceCols(const Matrix& a, std::size_t begin, std::size_t width) {
  if (begin + width > a.cols()) throw ArgumentError("SliceCols: out of range");
  Matrix c(a.rows(), width);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < width; ++j) c(i, j) = a(i, begin + j);
  }
  return c;
}

}  // namespace dsr
