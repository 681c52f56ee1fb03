// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

#include "gruwatch/simd/kernels.hpp"

namespace gruwatch::simd {

// Row-major matrix view over a flat parameter buffer.
struct MatrixView {
  const double* data;
  std::size_t rows;
  std::size_t cols;

  std::span<const double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

struct MutableMatrixView {
  double* data;
  std::size_t rows;
  std::size_t cols;

  std::span<double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

// y += W x
void gemv_add(MatrixView w, std::span<const double> x, std::span<double> y,
              const KernelTable& k = kernels());

// x_grad += W^T g
void gemv_transposed_add(MatrixView w, std::span<const double> g, std::span<double> x_grad,
                         const KernelTable& k = kernels());

// G += g x^T
void outer_add(std::span<const double> g, std::span<const double> x, MutableMatrixView grad,
               const KernelTable& k = kernels());

}  // namespace gruwatch::simd
