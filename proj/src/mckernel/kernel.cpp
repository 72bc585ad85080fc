#include "kloewner/error.hpp"
#include "kloewner/mckernel.hpp"

#include <cmath>

namespace kloewner {

std::vector<KernelField> phi_kernels(const LaplaceDomain& domain, std::span<const cplx> zetas,
                                     const LaplaceOptions& opts) {
  for (const cplx& z : zetas) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidInput, "kernel pole not on the unit circle");
  }
  auto dom = std::make_shared<const LaplaceDomain>(domain);
  const std::size_t n = domain.holes.size();
  std::vector<BoundaryData> data;
  for (std::size_t j = 0; j < n; ++j)
    data.push_back([j](cplx, int c) { return c == int(j) + 1 ? 1.0 : 0.0; });
  for (const cplx& zeta : zetas) {
    data.push_back([zeta](cplx z, int c) { return c == 0 ? 0.0 : -((zeta + z) / (zeta - z)).real(); });
  }
  LaplaceSystem sys(dom, opts);
  const auto sol = sys.solve(data);

  HarmonicBundle b;
  b.domain = dom;
  b.omega.assign(sol.begin(), sol.begin() + Eigen::Index(n));
  b.period = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      b.period(Eigen::Index(j), Eigen::Index(k)) = period_by_coefficient(b.omega[k], j);
  b.period = 0.5 * (b.period + b.period.transpose());
  double omega_res = 0.0;
  for (const auto& w : b.omega) omega_res = std::max(omega_res, w.residual);

  std::vector<KernelField> out;
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    const LaplaceSolution& v = sol[n + i];
    KernelField f;
    f.zeta = zetas[i];
    f.corrector = v;
    f.residual = std::max(omega_res, v.residual);
    Eigen::VectorXd c;
    if (n > 0) {
      Eigen::VectorXd per = Eigen::VectorXd::Zero(Eigen::Index(n));
      for (std::size_t j = 0; j < n; ++j) per[Eigen::Index(j)] = period_by_coefficient(v, j);
      c = -b.solve_period(per);
      for (std::size_t k = 0; k < n; ++k) f.corrector.coeffs += c[Eigen::Index(k)] * b.omega[k].coeffs;
    }
    const cplx raw0 = 1.0 + f.corrector.analytic(0.0);
    f.raw_origin = raw0.real();
    f.scale = 1.0 / raw0.real();
    f.imag_shift = raw0.imag();
    for (std::size_t j = 0; j < n; ++j) f.slit_values.push_back(f.scale * c[Eigen::Index(j)]);
    out.push_back(std::move(f));
  }
  return out;
}

KernelField phi_kernel(const LaplaceDomain& domain, cplx zeta, const LaplaceOptions& opts) {
  const cplx z[1] = {zeta};
  return phi_kernels(domain, z, opts).front();
}

KernelField phi_kernel(const CircularSlitDisk& domain, cplx zeta, const LaplaceOptions& opts) {
  return phi_kernel(LaplaceDomain::from_slit_disk(domain), zeta, opts);
}

cplx KernelField::operator()(cplx z) const {
  if (std::abs(z - zeta) < guard) throw Error(ErrorCode::PoleHit, "kernel evaluated at its pole", -1, -1, std::abs(z - zeta));
  const cplx raw = (zeta + z) / (zeta - z) + corrector.analytic(z);
  return scale * (raw - cplx(0.0, imag_shift));
}

cplx KernelField::on_hole(cplx z, int hole, cplx psi) const {
  const cplx raw = (zeta + z) / (zeta - z) + corrector.analytic_on(z, hole, psi);
  return scale * (raw - cplx(0.0, imag_shift));
}

cplx KernelField::derivative(cplx z) const {
  if (std::abs(z - zeta) < guard) throw Error(ErrorCode::PoleHit, "kernel evaluated at its pole", -1, -1, std::abs(z - zeta));
  return scale * (2.0 * zeta / ((zeta - z) * (zeta - z)) + corrector.gradient(z));
}

}  // namespace kloewner
