// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace gruwatch::model {

/// Dense row-major matrix. Rows are timesteps (or windows), columns features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  /// Rows [first, first + count) as a new matrix.
  Matrix slice(std::size_t first, std::size_t count) const {
    Matrix out(count, cols);
    std::copy(data.begin() + static_cast<std::ptrdiff_t>(first * cols),
              data.begin() + static_cast<std::ptrdiff_t>((first + count) * cols), out.data.begin());
    return out;
  }

  bool operator==(const Matrix&) const = default;
};

}  // namespace gruwatch::model
