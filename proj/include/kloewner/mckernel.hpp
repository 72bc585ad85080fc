#pragma once

#include "kloewner/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace kloewner {

// Inner boundary component of a domain inside the unit disk.
class Hole {
 public:
  enum class Kind { Arc, Jordan };

  // Concentric slit arc (exact circular geometry).
  static Hole circular_arc(const ArcSlit& slit);
  // Analytic arc through ordered samples e1 … e2; must be a graph over the chord
  // of its three-point circle.
  static Hole arc(std::vector<cplx> samples);
  static Hole circle(cplx center, double radius, std::size_t n = 256);
  // Closed loop sampled at uniform parameter, star-shaped about `center`.
  static Hole jordan(std::vector<cplx> loop, cplx center);

  Kind kind() const { return kind_; }
  const std::vector<cplx>& samples() const { return samples_; }
  cplx center() const { return center_; }
  bool circular() const { return circular_; }

  // Arc chart m(z): e1 → −1, mid → 0, e2 → 1.
  cplx chart(cplx z) const;
  cplx chart_inverse(cplx m) const;
  cplx chart_derivative(cplx z) const;
  // Exterior coordinate: Joukowski inverse of the chart (arcs), r/(z − c) (Jordan); |ψ| < 1 outside.
  cplx psi(cplx z) const;
  cplx psi_derivative(cplx z, cplx psi) const;
  // Log term ℓ(z) with log|ℓ| harmonic off the hole and one unit of winding around it.
  cplx log_arg(cplx z, cplx psi) const;
  cplx log_arg_derivative(cplx z, cplx psi) const;

  // Boundary point at parameter θ ∈ [0, 2π); arcs give both sides (ψ on the side in `psi_side`).
  cplx boundary_point(double theta, cplx& psi_side) const;
  // Closed contour at offset `delta` in the exterior coordinate.
  std::vector<cplx> offset_contour(double delta, std::size_t n) const;
  double scale() const { return scale_; }

 private:
  Kind kind_ = Kind::Arc;
  std::vector<cplx> samples_;
  std::vector<double> theta_;  // arc samples: chart angle arccos(Re m)
  cplx center_;
  bool circular_ = true;
  cplx e1_, e2_, em_;
  cplx dlin_, d0_;  // D(z) = dlin·z + d0
  cplx zp_;
  bool finite_pole_ = true;
  double scale_ = 1.0;
  std::vector<double> lens_x_, lens_y_;

  void init_arc();
  bool in_lens(cplx m) const;
};

struct LaplaceDomain {
  std::vector<Hole> holes;

  static LaplaceDomain from_slit_disk(const CircularSlitDisk& d);
  std::size_t components() const { return holes.size() + 1; }
  // Inside the disk and off every hole (Jordan interiors excluded).
  bool contains(cplx z, double margin = 0.0) const;
};

struct LaplaceOptions {
  double tol_lap = 1e-6;
  int max_level = 7;
  // Fixed degrees (≤ 0 selects adaptively).
  int poly_degree = 0;
  int hole_degree = 0;
  // Collocation points per unknown on each component.
  double oversampling = 3.0;
  // Cap on collocation points per component (≤ 0 for none); used to provoke underdetermined fits.
  int max_points_per_component = 0;
};

// Boundary data: value at boundary point z on component c (0 outer, j+1 for hole j).
using BoundaryData = std::function<double(cplx z, int component)>;

struct BasisInfo {
  int poly_degree = 0;
  int hole_degree = 0;
  std::size_t columns() const;
  std::size_t hole_offset(std::size_t j) const;
  std::size_t n_holes = 0;
};

// Harmonic function represented as Σ a_b u_b over the domain basis.
struct LaplaceSolution {
  std::shared_ptr<const LaplaceDomain> domain;
  BasisInfo basis;
  Eigen::VectorXd coeffs;
  double fit_residual = 0.0;
  double residual = 0.0;  // validation grid

  double value(cplx z) const;
  // Value with hole `hole` seen from the side given by its exterior coordinate.
  double value_on(cplx z, int hole, cplx psi) const;
  // u_x − i u_y.
  cplx gradient(cplx z) const;
  // Single-valued part of the analytic completion plus Re of the log terms.
  cplx analytic(cplx z) const;
  cplx analytic_on(cplx z, int hole, cplx psi) const;
  double log_coefficient(std::size_t hole) const;
};

// Least-squares system for one domain and basis; reused for many data sets.
class LaplaceSystem {
 public:
  LaplaceSystem(std::shared_ptr<const LaplaceDomain> domain, const LaplaceOptions& opts);

  // Solves every data set, raising the degree until all validation residuals meet tol.
  std::vector<LaplaceSolution> solve(std::span<const BoundaryData> data);
  const BasisInfo& basis() const { return basis_; }
  int level() const { return level_; }
  std::size_t rows() const { return rows_; }

 private:
  std::shared_ptr<const LaplaceDomain> domain_;
  LaplaceOptions opts_;
  BasisInfo basis_;
  int level_ = 0;
  std::size_t rows_ = 0;
};

LaplaceSolution solve_dirichlet(const LaplaceDomain& domain, const BoundaryData& data,
                                const LaplaceOptions& opts = {});

// Flux −∮_{C_j} ∂u/∂n (normal into the domain); coefficient and contour routes.
double period_by_coefficient(const LaplaceSolution& u, std::size_t hole);
double period_by_contour(const LaplaceSolution& u, std::size_t hole, std::size_t n = 0);

struct HarmonicBundle {
  std::shared_ptr<const LaplaceDomain> domain;
  std::vector<LaplaceSolution> omega;
  Eigen::MatrixXd period;
  double asymmetry = 0.0;
  double contour_mismatch = 0.0;
  double condition = 0.0;
  Eigen::VectorXd eigenvalues;
  double residual = 0.0;

  std::size_t size() const { return omega.size(); }
  Eigen::VectorXd solve_period(const Eigen::VectorXd& rhs) const;
};

HarmonicBundle harmonic_bundle(const LaplaceDomain& domain, const LaplaceOptions& opts = {});
HarmonicBundle harmonic_bundle(const CircularSlitDisk& domain, const LaplaceOptions& opts = {});

// G(z) = −ln|z − pole| + corrector.
struct GreenFunction {
  cplx pole;
  LaplaceSolution corrector;
  double value(cplx z) const;
};

GreenFunction green(const LaplaceDomain& domain, cplx pole, const LaplaceOptions& opts = {});

// Φ(ζ, z) = s·[(ζ+z)/(ζ−z) + H(z)] + iκ with H single valued.
struct KernelField {
  cplx zeta;
  LaplaceSolution corrector;  // combined corrector, log terms cancelled
  double scale = 1.0;
  double imag_shift = 0.0;
  double raw_origin = 1.0;   // Re Φ(ζ,0) before scaling
  double residual = 0.0;
  std::vector<double> slit_values;  // Re Φ on each inner component
  double guard = 1e-7;

  cplx operator()(cplx z) const;
  // Boundary value on inner component `hole` from the side with exterior coordinate `psi`.
  cplx on_hole(cplx z, int hole, cplx psi) const;
  cplx derivative(cplx z) const;
};

KernelField phi_kernel(const CircularSlitDisk& domain, cplx zeta, const LaplaceOptions& opts = {});
KernelField phi_kernel(const LaplaceDomain& domain, cplx zeta, const LaplaceOptions& opts = {});
// Shares one least-squares system across several poles.
std::vector<KernelField> phi_kernels(const LaplaceDomain& domain, std::span<const cplx> zetas,
                                     const LaplaceOptions& opts = {});

struct CanonicalMap {
  cplx z0;
  LaplaceSolution corrector;  // H = log(F/(z − z0)) up to the rotation
  double rotation = 0.0;
  double lmr = 0.0;        // ln F'(z0)
  CircularSlitDisk image;
  double residual = 0.0;   // max deviation of |F| from its per-component constant
  std::vector<double> radii;

  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
};

CanonicalMap canonical_slit_disk_map(const LaplaceDomain& domain, cplx z0, const LaplaceOptions& opts = {});
CanonicalMap canonical_slit_disk_map(const CircularSlitDisk& domain, cplx z0, const LaplaceOptions& opts = {});

}  // namespace kloewner
