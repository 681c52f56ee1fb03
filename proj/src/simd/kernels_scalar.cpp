// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/simd/kernels.hpp"

namespace gruwatch::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void central_moments_scalar(const double* x, std::size_t n, double shift, double* sum_sq,
                            double* sum_cube) {
  double s2 = 0.0;
  double s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - shift;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
  }
  *sum_sq = s2;
  *sum_cube = s3;
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

constexpr KernelTable kScalar{
    "scalar",           dot_scalar,          sum_scalar,      axpy_scalar, squared_distance_scalar,
    central_moments_scalar, hadamard_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace gruwatch::simd
