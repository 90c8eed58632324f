// dsr/matrix.h

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

#ifndef DSR_MATRIX_H_
#define DSR_MATRIX_H_

#include <cstddef>
#include <vector>

namespace dsr {

// Dense row-major double matrix. All network math is double precision so the
// finite-difference gradient oracles have headroom.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return v_[r * cols_ + c];
  }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  void setZero() { std::fill(v_.begin(), v_.end(), 0.0); }

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

// C = A B
Matrix MatMul(const Matrix& a, const Matrix& b);
// C = A^T B
Matrix MatMulTN(const Matrix& a, const Matrix& b);
// C = A B^T
Matrix MatMulNT(const Matrix& a, const Matrix& b);

// out = x W^T + b broadcast over rows; W is out_dim x in_dim, b out_dim.
Matrix AffineForward(const Matrix& x, const Matrix& w,
                     const std::vector<double>& b);

Matrix Hadamard(const Matrix& a, const Matrix& b);
Matrix Transpose(const Matrix& a);
std::vector<double> ColumnSums(const Matrix& a);

// Horizontal concatenation [a | b] with equal row counts.
Matrix ConcatCols(const Matrix& a, const Matrix& b);
// Column slice [begin, begin+width).
Matrix SliceCols(const Matrix& a, std::size_t begin, std::size_t width);

}  // namespace dsr

#endif  // DSR_MATRIX_H_
