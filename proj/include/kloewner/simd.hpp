#pragma once

#include <cstddef>

namespace kloewner::simd {

// One geodesic slit stage in structure-of-arrays friendly form.
//   L(z) = i(b - z) / ((b + z) - k i(b - z))
//   F(L) = L sqrt(1 + y^2 / L^2)
//   M(F) = rot (F - q) / (F - conj q)
struct StageCoeffs {
  double br, bi;
  double k;
  double y2;
  double qr, qi;
  double rr, ri;
};

enum class Isa { Scalar, Avx2 };

bool avx2_available();
Isa active_isa();
// Forces a code path; requests for an unavailable ISA fall back to Scalar.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n);
void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n);
// out = z * sum_k lam_k (xi_k + z) / (xi_k - z)
void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n);

namespace scalar {
void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n);
void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n);
void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n);
}  // namespace scalar

namespace avx2 {
void stage_forward(const StageCoeffs& c, double* re, double* im, std::size_t n);
void stage_inverse(const StageCoeffs& c, double* re, double* im, std::size_t n);
void loewner_rhs(const double* xr, const double* xi, const double* lam, std::size_t m,
                 const double* zr, const double* zi, double* outr, double* outi, std::size_t n);
}  // namespace avx2

}  // namespace kloewner::simd
