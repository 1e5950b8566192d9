#include "fsdet/kernels.hpp"

namespace fsdet::kernels::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void shift_scale(double* x, std::size_t n, double shift, double scale) {
  for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] - shift) * scale;
}

void gram(const double* x, std::size_t n, std::size_t p, double* out) {
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double v = dot(x + i * n, x + j * n, n);
      out[i + j * p] = v;
      out[j + i * p] = v;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::Scalar, &dot, &axpy, &sum, &shift_scale, &gram};
  return t;
}

}  // namespace fsdet::kernels::detail
