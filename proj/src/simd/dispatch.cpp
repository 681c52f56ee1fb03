// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "gruwatch/simd/kernels.hpp"

namespace gruwatch::simd {
namespace {

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("GRUWATCH_SIMD")) {
    if (std::string_view(forced) == "scalar") return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return *t;
  if (const KernelTable* t = neon_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& kernels() noexcept {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace gruwatch::simd
