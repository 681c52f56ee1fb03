// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

namespace gruwatch::simd {

// Raw double-precision kernels behind the model and statistics inner loops.
// Every ISA variant fills the same table; the scalar table is the reference
// the others are equivalence-tested against.
struct KernelTable {
  std::string_view isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_i (x[i] - shift)^2 and sum_i (x[i] - shift)^3
  void (*central_moments)(const double* x, std::size_t n, double shift, double* sum_sq,
                          double* sum_cube);
  // out[i] = a[i] * b[i]
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

// Best table for this CPU, chosen once. GRUWATCH_SIMD=scalar forces the
// reference path.
const KernelTable& kernels() noexcept;

}  // namespace gruwatch::simd
