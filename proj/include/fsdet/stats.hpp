#pragma once

#include <cstddef>
#include <span>

namespace fsdet {

/// Neumaier-compensated sum; the result depends only on the order of `xs`.
double compensated_sum(std::span<const double> xs);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // denominator n-1; 0 when n < 2
  std::size_t n = 0;
};

/// Two-pass mean/SD with compensated sums.
Summary summarize(std::span<const double> xs);

}  // namespace fsdet
