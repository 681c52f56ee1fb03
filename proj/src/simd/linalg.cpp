// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/simd/linalg.hpp"

#include <cassert>

namespace gruwatch::simd {

void gemv_add(MatrixView w, std::span<const double> x, std::span<double> y, const KernelTable& k) {
  assert(x.size() == w.cols && y.size() == w.rows);
  for (std::size_t r = 0; r < w.rows; ++r) y[r] += k.dot(w.data + r * w.cols, x.data(), w.cols);
}

void gemv_transposed_add(MatrixView w, std::span<const double> g, std::span<double> x_grad,
                         const KernelTable& k) {
  assert(g.size() == w.rows && x_grad.size() == w.cols);
  for (std::size_t r = 0; r < w.rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], w.data + r * w.cols, x_grad.data(), w.cols);
  }
}

void outer_add(std::span<const double> g, std::span<const double> x, MutableMatrixView grad,
               const KernelTable& k) {
  assert(g.size() == grad.rows && x.size() == grad.cols);
  for (std::size_t r = 0; r < grad.rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], x.data(), grad.data + r * grad.cols, grad.cols);
  }
}

}  // namespace gruwatch::simd
