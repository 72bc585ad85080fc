#include "kloewner/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace kloewner::simd {
namespace {

Isa detect() {
  if (const char* env = std::getenv("KLOEWNER_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  }
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  if (active_isa() == Isa::Avx2) return avx2::stage_forward(c, re, im, n);
  scalar::stage_forward(c, re, im, n);
}

void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n) {
  if (active_isa() == Isa::Avx2) return avx2::stage_inverse(c, re, im, n);
  scalar::stage_inverse(c, re, im, n);
}

void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n) {
  if (active_isa() == Isa::Avx2) return avx2::loewner_rhs(xr, xi, lam, m, zr, zi, outr, outi, n);
  scalar::loewner_rhs(xr, xi, lam, m, zr, zi, outr, outi, n);
}

}  // namespace kloewner::simd
