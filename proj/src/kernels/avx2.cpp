// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "fsdet/kernels.hpp"

namespace fsdet::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

void shift_scale(double* x, std::size_t n, double shift, double scale) {
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d vk = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vs), vk));
  }
  for (; i < n; ++i) x[i] = (x[i] - shift) * scale;
}

// Four columns of the lower triangle per pass so column j is streamed once
// per block instead of once per entry.
void gram(const double* x, std::size_t n, std::size_t p, double* out) {
  for (std::size_t j = 0; j < p; ++j) {
    const double* cj = x + j * n;
    std::size_t i = 0;
    for (; i + 4 <= j + 1; i += 4) {
      const double* c0 = x + i * n;
      const double* c1 = c0 + n;
      const double* c2 = c1 + n;
      const double* c3 = c2 + n;
      __m256d a0 = _mm256_setzero_pd();
      __m256d a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd();
      __m256d a3 = _mm256_setzero_pd();
      std::size_t k = 0;
      for (; k + 4 <= n; k += 4) {
        const __m256d vj = _mm256_loadu_pd(cj + k);
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(c0 + k), vj, a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(c1 + k), vj, a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(c2 + k), vj, a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(c3 + k), vj, a3);
      }
      double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
      for (; k < n; ++k) {
        s0 += c0[k] * cj[k];
        s1 += c1[k] * cj[k];
        s2 += c2[k] * cj[k];
        s3 += c3[k] * cj[k];
      }
      const double s[4] = {s0, s1, s2, s3};
      for (std::size_t b = 0; b < 4; ++b) {
        out[(i + b) + j * p] = s[b];
        out[j + (i + b) * p] = s[b];
      }
    }
    for (; i <= j; ++i) {
      const double v = dot(x + i * n, cj, n);
      out[i + j * p] = v;
      out[j + i * p] = v;
    }
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t{Isa::Avx2, &dot, &axpy, &sum, &shift_scale, &gram};
  return &t;
}

}  // namespace fsdet::kernels::detail
