#include "kloewner/error.hpp"
#include "kloewner/mckernel.hpp"

#include <cmath>

namespace kloewner {

HarmonicBundle harmonic_bundle(const LaplaceDomain& domain, const LaplaceOptions& opts) {
  HarmonicBundle b;
  auto dom = std::make_shared<const LaplaceDomain>(domain);
  b.domain = dom;
  const std::size_t n = domain.holes.size();
  b.period = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  if (n == 0) return b;

  std::vector<BoundaryData> data;
  for (std::size_t j = 0; j < n; ++j)
    data.push_back([j](cplx, int c) { return c == int(j) + 1 ? 1.0 : 0.0; });
  LaplaceSystem sys(dom, opts);
  b.omega = sys.solve(data);
  for (const auto& w : b.omega) b.residual = std::max(b.residual, w.residual);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double pc = period_by_coefficient(b.omega[k], j);
      p(Eigen::Index(j), Eigen::Index(k)) = pc;
      b.contour_mismatch = std::max(b.contour_mismatch, std::abs(pc - period_by_contour(b.omega[k], j)));
    }
  }
  b.asymmetry = (p - p.transpose()).cwiseAbs().maxCoeff();
  b.period = 0.5 * (p + p.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.period, Eigen::EigenvaluesOnly);
  b.eigenvalues = eig.eigenvalues();
  const double lo = b.eigenvalues.minCoeff(), hi = b.eigenvalues.maxCoeff();
  b.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  Eigen::LLT<Eigen::MatrixXd> llt(b.period);
  if (llt.info() != Eigen::Success || !(lo > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "period matrix is not positive definite", -1, -1, lo);
  }
  return b;
}

HarmonicBundle harmonic_bundle(const CircularSlitDisk& domain, const LaplaceOptions& opts) {
  return harmonic_bundle(LaplaceDomain::from_slit_disk(domain), opts);
}

Eigen::VectorXd HarmonicBundle::solve_period(const Eigen::VectorXd& rhs) const {
  Eigen::LLT<Eigen::MatrixXd> llt(period);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "period matrix is not positive definite");
  }
  return llt.solve(rhs);
}

double GreenFunction::value(cplx z) const { return -std::log(std::abs(z - pole)) + corrector.value(z); }

GreenFunction green(const LaplaceDomain& domain, cplx pole, const LaplaceOptions& opts) {
  if (!domain.contains(pole)) throw Error(ErrorCode::OutsideDomain, "Green pole outside the domain");
  GreenFunction g;
  g.pole = pole;
  g.corrector = solve_dirichlet(domain, [pole](cplx z, int) { return std::log(std::abs(z - pole)); }, opts);
  return g;
}

}  // namespace kloewner
