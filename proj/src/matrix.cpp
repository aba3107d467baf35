// src/matrix.cpp

// Copyright 2026  The dannphone Authors
//
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

#include "dannphone/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "dannphone/error.hpp"

namespace dannphone {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    fail(ErrorKind::kDimension, "matrix data has ", data_.size(),
         " values, expected ", rows_, "x", cols_);
}

RealMatrix::RealMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto &r : rows) {
    if (r.size() != cols_)
      fail(ErrorKind::kDimension, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void RealMatrix::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool RealMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

RealMatrix transpose(const RealMatrix &m) {
  RealMatrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  return t;
}

RealMatrix matmul(const RealMatrix &a, const RealMatrix &b) {
  if (a.cols() != b.rows())
    fail(ErrorKind::kDimension, "matmul ", a.rows(), "x", a.cols(), " by ",
         b.rows(), "x", b.cols());
  RealMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double *dst = out.row(r).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(r, k);
      const double *src = b.row(k).data();
      for (std::size_t c = 0; c < n; ++c) dst[c] += s * src[c];
    }
  }
  return out;
}

RealMatrix matmul_transposed(const RealMatrix &a, const RealMatrix &b) {
  if (a.cols() != b.cols())
    fail(ErrorKind::kDimension, "matmul_transposed ", a.rows(), "x", a.cols(),
         " by (", b.rows(), "x", b.cols(), ")^T");
  return matmul(a, transpose(b));
}

RealMatrix transposed_matmul(const RealMatrix &a, const RealMatrix &b) {
  if (a.rows() != b.rows())
    fail(ErrorKind::kDimension, "transposed_matmul (", a.rows(), "x", a.cols(),
         ")^T by ", b.rows(), "x", b.cols());
  RealMatrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double *src = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(r, i);
      if (s == 0.0) continue;
      double *dst = out.row(i).data();
      for (std::size_t c = 0; c < n; ++c) dst[c] += s * src[c];
    }
  }
  return out;
}

RealMatrix gather_rows(const RealMatrix &m,
                       std::span<const std::size_t> indices) {
  RealMatrix out(indices.size(), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= m.rows())
      fail(ErrorKind::kIndex, "row ", indices[i], " out of ", m.rows());
    std::copy_n(m.row(indices[i]).begin(), m.cols(), out.row(i).begin());
  }
  return out;
}

RealMatrix hconcat(const RealMatrix &a, const RealMatrix &b) {
  if (a.rows() != b.rows())
    fail(ErrorKind::kDimension, "hconcat rows ", a.rows(), " vs ", b.rows());
  RealMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + a.cols());
  }
  return out;
}

RealMatrix vconcat(const RealMatrix &a, const RealMatrix &b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.cols() != b.cols())
    fail(ErrorKind::kDimension, "vconcat cols ", a.cols(), " vs ", b.cols());
  std::vector<double> data(a.values());
  data.insert(data.end(), b.values().begin(), b.values().end());
  return RealMatrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

std::vector<double> column_sums(const RealMatrix &m) {
  std::vector<double> sums(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) sums[c] += m(r, c);
  return sums;
}

double max_abs_diff(const RealMatrix &a, const RealMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::kDimension, "max_abs_diff shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace dannphone
