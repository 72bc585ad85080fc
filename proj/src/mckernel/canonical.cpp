#include "kloewner/error.hpp"
#include "kloewner/mc_hull.hpp"

#include <algorithm>
#include <cmath>

namespace kloewner {

namespace {

CanonicalMap build(const LaplaceDomain& domain, cplx z0, const LaplaceOptions& opts, bool full) {
  if (!domain.contains(z0)) throw Error(ErrorCode::OutsideDomain, "basepoint outside the domain");
  auto dom = std::make_shared<const LaplaceDomain>(domain);
  const std::size_t n = domain.holes.size();
  std::vector<BoundaryData> data;
  for (std::size_t j = 0; j < n; ++j)
    data.push_back([j](cplx, int c) { return c == int(j) + 1 ? 1.0 : 0.0; });
  data.push_back([z0](cplx z, int) { return std::log(std::abs(z - z0)); });
  LaplaceSystem sys(dom, opts);
  const auto sol = sys.solve(data);
  const LaplaceSolution& w = sol[n];

  CanonicalMap m;
  m.z0 = z0;
  m.corrector = w;
  m.corrector.coeffs = -w.coeffs;
  if (n > 0) {
    HarmonicBundle b;
    b.period = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    Eigen::VectorXd per = Eigen::VectorXd::Zero(Eigen::Index(n));
    for (std::size_t j = 0; j < n; ++j) {
      per[Eigen::Index(j)] = period_by_coefficient(w, j);
      for (std::size_t k = 0; k < n; ++k)
        b.period(Eigen::Index(j), Eigen::Index(k)) = period_by_coefficient(sol[k], j);
    }
    b.period = 0.5 * (b.period + b.period.transpose());
    const Eigen::VectorXd c = b.solve_period(per);
    for (std::size_t k = 0; k < n; ++k) {
      m.corrector.coeffs += c[Eigen::Index(k)] * sol[k].coeffs;
      m.radii.push_back(std::exp(c[Eigen::Index(k)]));
    }
  }
  const cplx h0 = m.corrector.analytic(z0);
  m.rotation = -h0.imag();
  m.lmr = h0.real();
  if (!full) return m;

  // boundary residual of log|F| against its per-component constant
  const std::size_t nb = 512;
  for (std::size_t i = 0; i < nb; ++i) {
    const cplx z = std::polar(1.0, kTwoPi * (i + 0.25) / double(nb));
    m.residual = std::max(m.residual, std::abs(std::log(std::abs(z - z0)) + m.corrector.value(z)));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double target = std::log(m.radii[j]);
    for (std::size_t i = 0; i < nb; ++i) {
      cplx side;
      const cplx z = domain.holes[j].boundary_point(kTwoPi * (i + 0.25) / double(nb), side);
      const double lf = std::log(std::abs(z - z0)) + m.corrector.value_on(z, int(j), side);
      m.residual = std::max(m.residual, std::abs(lf - target));
    }
    // image arc: angular range of F just off the hole
    const auto contour = domain.holes[j].offset_contour(1e-9, 2048);
    std::vector<double> ang;
    for (const cplx& z : contour) ang.push_back(std::arg(m(z)));
    ang = unwrap_angles(ang);
    const auto [lo, hi] = std::minmax_element(ang.begin(), ang.end());
    ArcSlit s;
    s.radius = m.radii[j];
    const double shift = kTwoPi * std::floor(*lo / kTwoPi);
    s.alpha = *lo - shift;
    s.beta = *hi - shift;
    m.image.slits.push_back(s);
  }
  return m;
}

}  // namespace

CanonicalMap canonical_slit_disk_map(const LaplaceDomain& domain, cplx z0, const LaplaceOptions& opts) {
  return build(domain, z0, opts, true);
}

double canonical_lmr(const LaplaceDomain& domain, cplx z0, const LaplaceOptions& opts) {
  return build(domain, z0, opts, false).lmr;
}

CanonicalMap canonical_slit_disk_map(const CircularSlitDisk& domain, cplx z0, const LaplaceOptions& opts) {
  return canonical_slit_disk_map(LaplaceDomain::from_slit_disk(domain), z0, opts);
}

cplx CanonicalMap::operator()(cplx z) const {
  return (z - z0) * std::exp(corrector.analytic(z) + cplx(0.0, rotation));
}

cplx CanonicalMap::derivative(cplx z) const {
  const cplx e = std::exp(corrector.analytic(z) + cplx(0.0, rotation));
  return e * (1.0 + (z - z0) * corrector.gradient(z));
}

}  // namespace kloewner
