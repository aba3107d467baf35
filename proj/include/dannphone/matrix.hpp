// dannphone/matrix.hpp

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

#ifndef DANNPHONE_MATRIX_HPP_
#define DANNPHONE_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dannphone {

/// Dense row-major matrix of doubles. A vector is a 1 x n or n x 1 matrix,
/// or simply a std::vector<double> where no shape is needed.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Row-list literal, used mostly by tests: {{1, 2}, {3, 4}}.
  RealMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double> &values() const { return data_; }

  void set_zero();
  bool all_finite() const;

  bool operator==(const RealMatrix &other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b^T with plain left-to-right accumulation over the shared dimension.
RealMatrix matmul_transposed(const RealMatrix &a, const RealMatrix &b);
/// a^T * b, accumulated over rows in increasing order.
RealMatrix transposed_matmul(const RealMatrix &a, const RealMatrix &b);
/// a * b.
RealMatrix matmul(const RealMatrix &a, const RealMatrix &b);

RealMatrix transpose(const RealMatrix &m);

/// Rows of `m` selected by `indices`, in that order.
RealMatrix gather_rows(const RealMatrix &m, std::span<const std::size_t> indices);

/// [a | b]; both must have the same row count.
RealMatrix hconcat(const RealMatrix &a, const RealMatrix &b);
/// a stacked above b; both must have the same column count.
RealMatrix vconcat(const RealMatrix &a, const RealMatrix &b);

/// Column sums, in row order.
std::vector<double> column_sums(const RealMatrix &m);

double max_abs_diff(const RealMatrix &a, const RealMatrix &b);

}  // namespace dannphone

#endif  // DANNPHONE_MATRIX_HPP_
