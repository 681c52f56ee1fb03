// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "gruwatch/simd/kernels.hpp"

namespace gruwatch::features {

struct SummaryStatistics {
  double min = 0.0;
  double max = 0.0;
  double count = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double std = 0.0;       // sample (n - 1); 0 when n < 2
  double skewness = 0.0;  // adjusted Fisher-Pearson G1; 0 when n < 3 or zero spread
};

/// The seven window statistics over a raw list. Undefined moments are zero.
/// An empty input yields all zeros.
SummaryStatistics summarize(std::span<const double> values,
                            const simd::KernelTable& k = simd::kernels());

}  // namespace gruwatch::features
