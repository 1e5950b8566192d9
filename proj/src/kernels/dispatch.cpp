#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fsdet/errors.hpp"
#include "fsdet/kernels.hpp"

namespace fsdet::kernels {

namespace detail {
#ifndef FSDET_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(FSDET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("FSDET_ISA")) {
    const std::string_view v(env);
    if (v == "scalar") return &detail::scalar_table();
    if (v == "avx2" && supported(Isa::Avx2)) return detail::avx2_table();
  }
  if (supported(Isa::Avx2)) return detail::avx2_table();
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

const char* name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: {
      static const bool ok = detail::avx2_table() != nullptr && cpu_has_avx2();
      return ok;
    }
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) fail(ErrorKind::InvalidArgument, std::string("kernel ISA not available: ") + name(isa));
  return isa == Isa::Avx2 ? *detail::avx2_table() : detail::scalar_table();
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { slot().store(&table(isa), std::memory_order_release); }

}  // namespace fsdet::kernels
