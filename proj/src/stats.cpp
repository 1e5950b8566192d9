#include "fsdet/stats.hpp"

#include <cmath>

namespace fsdet {

double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double c = 0.0;
  for (const double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  s.mean = compensated_sum(xs) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double sum = 0.0;
  double c = 0.0;
  for (const double x : xs) {
    const double d = (x - s.mean) * (x - s.mean);
    const double t = sum + d;
    c += (sum >= d) ? (sum - t) + d : (d - t) + sum;
    sum = t;
  }
  s.sd = std::sqrt((sum + c) / static_cast<double>(s.n - 1));
  return s;
}

}  // namespace fsdet
