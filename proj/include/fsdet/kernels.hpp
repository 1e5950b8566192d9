#pragma once

// Data-parallel inner loops behind the moment and sample-generation code.
// Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once per process from the CPU
// features; the FSDET_ISA environment variable ("scalar" or "avx2") or
// set_active() override the choice.

#include <cstddef>

namespace fsdet::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // x = (x - shift) * scale
  void (*shift_scale)(double* x, std::size_t n, double shift, double scale);
  // out = X'X for column-major X (n rows, p columns, leading dimension n);
  // out is p x p column-major and fully populated.
  void (*gram)(const double* x, std::size_t n, std::size_t p, double* out);
};

const char* name(Isa isa);
bool supported(Isa isa);

const KernelTable& table(Isa isa);
const KernelTable& active();
void set_active(Isa isa);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();
}  // namespace detail

}  // namespace fsdet::kernels
