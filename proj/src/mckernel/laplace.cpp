#include "kloewner/error.hpp"
#include "kloewner/mckernel.hpp"

#include <algorithm>
#include <cmath>

namespace kloewner {
namespace {

const cplx I{0.0, 1.0};

cplx joukowski_inverse(cplx m) { return 1.0 / (m + std::sqrt(m - 1.0) * std::sqrt(m + 1.0)); }

// Periodic Catmull–Rom interpolation of a closed loop at fractional index u.
cplx loop_point(const std::vector<cplx>& p, double u) {
  const std::size_t n = p.size();
  const double fl = std::floor(u);
  const double f = u - fl;
  const long i = long(fl);
  auto at = [&](long j) { return p[std::size_t(((j % long(n)) + long(n)) % long(n))]; };
  const cplx p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  return 0.5 * (2.0 * p1 + (p2 - p0) * f + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f * f +
                (3.0 * p1 - p0 - 3.0 * p2 + p3) * f * f * f);
}

double signed_area(const std::vector<cplx>& c) {
  double a = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const cplx p = c[i], q = c[(i + 1) % c.size()];
    a += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * a;
}

int level_degree(int level) { return int(std::lround(10.0 * std::pow(1.45, level))); }

struct Point {
  cplx z;
  int component;
  int hole = -1;
  cplx psi;
};

void eval_row(const LaplaceDomain& dom, const BasisInfo& b, const Point& p, double* row) {
  std::size_t c = 0;
  row[c++] = 1.0;
  cplx zn = 1.0;
  for (int n = 1; n <= b.poly_degree; ++n) {
    zn *= p.z;
    row[c++] = zn.real();
    row[c++] = zn.imag();
  }
  for (std::size_t j = 0; j < dom.holes.size(); ++j) {
    const Hole& h = dom.holes[j];
    const cplx psi = int(j) == p.hole ? p.psi : h.psi(p.z);
    row[c++] = std::log(std::abs(h.log_arg(p.z, psi)));
    cplx pn = 1.0;
    for (int n = 1; n <= b.hole_degree; ++n) {
      pn *= psi;
      row[c++] = pn.real();
      row[c++] = pn.imag();
    }
  }
}

std::vector<Point> boundary_points(const LaplaceDomain& dom, const BasisInfo& b, const LaplaceOptions& opts,
                                   bool validation) {
  std::vector<Point> pts;
  auto count = [&](int degree) {
    std::size_t n = std::size_t(std::ceil(opts.oversampling * (2 * degree + 1)));
    n = std::max<std::size_t>(n, 16);
    if (opts.max_points_per_component > 0) n = std::min<std::size_t>(n, std::size_t(opts.max_points_per_component));
    return n;
  };
  const double shift = validation ? 1.0 : 0.5;
  const std::size_t n0 = count(b.poly_degree);
  for (std::size_t i = 0; i < n0; ++i) {
    const double th = kTwoPi * (double(i) + shift) / double(n0);
    pts.push_back({std::polar(1.0, th), 0});
  }
  for (std::size_t j = 0; j < dom.holes.size(); ++j) {
    const std::size_t nj = count(b.hole_degree);
    for (std::size_t i = 0; i < nj; ++i) {
      const double th = kTwoPi * (double(i) + shift) / double(nj);
      Point p;
      p.z = dom.holes[j].boundary_point(th, p.psi);
      p.component = int(j) + 1;
      p.hole = int(j);
      pts.push_back(p);
    }
  }
  return pts;
}

Eigen::MatrixXd assemble(const LaplaceDomain& dom, const BasisInfo& b, const std::vector<Point>& pts) {
  Eigen::MatrixXd a(pts.size(), b.columns());
  std::vector<double> row(b.columns());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    eval_row(dom, b, pts[i], row.data());
    for (std::size_t c = 0; c < row.size(); ++c) a(Eigen::Index(i), Eigen::Index(c)) = row[c];
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------- Hole

Hole Hole::circular_arc(const ArcSlit& slit) {
  Hole h;
  h.kind_ = Kind::Arc;
  h.samples_ = {slit.start(), slit.mid(), slit.end()};
  h.e1_ = slit.start();
  h.e2_ = slit.end();
  h.em_ = slit.mid();
  h.circular_ = true;
  h.init_arc();
  return h;
}

Hole Hole::arc(std::vector<cplx> samples) {
  if (samples.size() < 3) throw Error(ErrorCode::InvalidInput, "arc hole needs at least three samples");
  Hole h;
  h.kind_ = Kind::Arc;
  h.samples_ = std::move(samples);
  h.e1_ = h.samples_.front();
  h.e2_ = h.samples_.back();
  // midpoint by arclength
  std::vector<double> s(h.samples_.size(), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = s[i - 1] + std::abs(h.samples_[i] - h.samples_[i - 1]);
  const double half = 0.5 * s.back();
  std::size_t i = 1;
  while (i + 1 < s.size() && s[i] < half) ++i;
  const double f = (half - s[i - 1]) / (s[i] - s[i - 1]);
  h.em_ = h.samples_[i - 1] + f * (h.samples_[i] - h.samples_[i - 1]);
  h.circular_ = false;
  h.init_arc();
  // lens profile of the arc in the chart
  double ymax = 0.0;
  for (const cplx& z : h.samples_) {
    const cplx m = h.chart(z);
    h.lens_x_.push_back(m.real());
    h.lens_y_.push_back(m.imag());
    ymax = std::max(ymax, std::abs(m.imag()));
  }
  h.lens_x_.front() = -1.0;
  h.lens_x_.back() = 1.0;
  h.lens_y_.front() = h.lens_y_.back() = 0.0;
  for (std::size_t k = 1; k < h.lens_x_.size(); ++k) {
    if (!(h.lens_x_[k] > h.lens_x_[k - 1])) {
      throw Error(ErrorCode::IllConditioned, "arc is not a graph over its chart chord", -1, int(k));
    }
  }
  for (double x : h.lens_x_) h.theta_.push_back(std::acos(std::clamp(x, -1.0, 1.0)));
  if (ymax < 1e-14) h.circular_ = true;
  return h;
}

Hole Hole::circle(cplx center, double radius, std::size_t n) {
  std::vector<cplx> loop(n);
  for (std::size_t i = 0; i < n; ++i) loop[i] = center + std::polar(radius, kTwoPi * double(i) / double(n));
  Hole h = jordan(std::move(loop), center);
  h.circular_ = true;
  return h;
}

Hole Hole::jordan(std::vector<cplx> loop, cplx center) {
  if (loop.size() < 8) throw Error(ErrorCode::InvalidInput, "Jordan hole needs at least eight samples");
  Hole h;
  h.kind_ = Kind::Jordan;
  if (signed_area(loop) < 0.0) std::reverse(loop.begin(), loop.end());
  h.samples_ = std::move(loop);
  h.center_ = center;
  h.circular_ = false;
  double r = 0.0;
  for (const cplx& z : h.samples_) r = std::max(r, std::abs(z - center));
  h.scale_ = r;
  return h;
}

void Hole::init_arc() {
  dlin_ = (e2_ - em_) - (em_ - e1_);
  d0_ = -e1_ * (e2_ - em_) + e2_ * (em_ - e1_);
  scale_ = 0.5 * std::abs(e2_ - e1_);
  finite_pole_ = std::abs(dlin_) > 1e-12 * std::abs(e2_ - e1_);
  zp_ = finite_pole_ ? -d0_ / dlin_ : cplx(0.0, 0.0);
  center_ = em_;
}

cplx Hole::chart(cplx z) const { return (z - em_) * (e2_ - e1_) / (dlin_ * z + d0_); }

cplx Hole::chart_inverse(cplx m) const { return (-em_ * (e2_ - e1_) - m * d0_) / (m * dlin_ - (e2_ - e1_)); }

cplx Hole::chart_derivative(cplx z) const {
  const cplx d = dlin_ * z + d0_;
  return 2.0 * (e2_ - e1_) * (em_ - e1_) * (e2_ - em_) / (d * d);
}

bool Hole::in_lens(cplx m) const {
  const double x = m.real();
  if (!(x > -1.0 && x < 1.0)) return false;
  const auto it = std::upper_bound(lens_x_.begin(), lens_x_.end(), x);
  const std::size_t i = std::size_t(it - lens_x_.begin());
  const double f = (x - lens_x_[i - 1]) / (lens_x_[i] - lens_x_[i - 1]);
  const double yc = lens_y_[i - 1] + f * (lens_y_[i] - lens_y_[i - 1]);
  const double y = m.imag();
  return (yc > 0.0 && y > 0.0 && y < yc) || (yc < 0.0 && y < 0.0 && y > yc);
}

cplx Hole::psi(cplx z) const {
  if (kind_ == Kind::Jordan) return scale_ / (z - center_);
  const cplx m = chart(z);
  cplx p = joukowski_inverse(m);
  if (!circular_ && in_lens(m)) p = 1.0 / p;
  return p;
}

cplx Hole::psi_derivative(cplx z, cplx psi) const {
  if (kind_ == Kind::Jordan) {
    const cplx d = z - center_;
    return -scale_ / (d * d);
  }
  return 2.0 * chart_derivative(z) * psi * psi / (psi * psi - 1.0);
}

cplx Hole::log_arg(cplx z, cplx psi) const {
  if (kind_ == Kind::Jordan) return (z - center_) / scale_;
  if (!finite_pole_) return psi;
  return psi * scale_ / (z - zp_);
}

cplx Hole::log_arg_derivative(cplx z, cplx psi) const {
  if (kind_ == Kind::Jordan) return 1.0 / scale_;
  const cplx dpsi = psi_derivative(z, psi);
  if (!finite_pole_) return dpsi;
  const cplx d = z - zp_;
  return scale_ * (dpsi * d - psi) / (d * d);
}

cplx Hole::boundary_point(double theta, cplx& psi_side) const {
  if (kind_ == Kind::Jordan) {
    const cplx z = circular_ ? center_ + std::polar(scale_, theta)
                             : loop_point(samples_, theta / kTwoPi * double(samples_.size()));
    psi_side = psi(z);
    return z;
  }
  const cplx target = std::polar(1.0, theta);
  if (circular_) {
    psi_side = target;
    return chart_inverse(std::cos(theta));
  }
  // local cubic interpolation of the samples in the chart angle (θ_ decreases from π to 0)
  const double th = theta <= kPi ? theta : kTwoPi - theta;
  const std::size_t n = theta_.size();
  std::size_t i = 0;
  while (i + 1 < n && theta_[i + 1] > th) ++i;
  const std::size_t lo = std::min(i > 0 ? i - 1 : 0, n >= 4 ? n - 4 : 0);
  const std::size_t cnt = std::min<std::size_t>(4, n);
  cplx z = 0.0;
  for (std::size_t a = lo; a < lo + cnt; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + cnt; ++b)
      if (b != a) w *= (th - theta_[b]) / (theta_[a] - theta_[b]);
    z += w * samples_[a];
  }
  const cplx p = joukowski_inverse(chart(z));
  psi_side = std::abs(p - target) <= std::abs(1.0 / p - target) ? p : 1.0 / p;
  return z;
}

std::vector<cplx> Hole::offset_contour(double delta, std::size_t n) const {
  std::vector<cplx> c(n);
  if (kind_ == Kind::Jordan) {
    for (std::size_t i = 0; i < n; ++i) c[i] = center_ + std::polar(scale_ * (1.0 + delta), kTwoPi * double(i) / double(n));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx p = std::polar(1.0 - delta, kTwoPi * double(i) / double(n));
      c[i] = chart_inverse(0.5 * (p + 1.0 / p));
    }
  }
  if (signed_area(c) < 0.0) std::reverse(c.begin(), c.end());
  return c;
}

// ---------------------------------------------------------------- domain

LaplaceDomain LaplaceDomain::from_slit_disk(const CircularSlitDisk& d) {
  validate_circular_slit_disk(d);
  LaplaceDomain out;
  for (const auto& s : d.slits) out.holes.push_back(Hole::circular_arc(s));
  return out;
}

bool LaplaceDomain::contains(cplx z, double margin) const {
  if (!(std::abs(z) < 1.0 - margin)) return false;
  for (const auto& h : holes) {
    if (h.kind() == Hole::Kind::Jordan) {
      const auto& p = h.samples();
      bool inside = false;
      for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        if ((p[i].imag() > z.imag()) != (p[j].imag() > z.imag()) &&
            z.real() < (p[j].real() - p[i].real()) * (z.imag() - p[i].imag()) / (p[j].imag() - p[i].imag()) +
                           p[i].real()) {
          inside = !inside;
        }
      }
      if (inside) return false;
      for (const cplx& s : p)
        if (std::abs(s - z) < margin) return false;
    } else {
      if ((1.0 - std::abs(h.psi(z))) * h.scale() <= margin) return false;
      if (margin <= 0.0) continue;
      cplx side;
      for (int i = 0; i < 256; ++i) {
        if (std::abs(h.boundary_point(kPi * (i + 0.5) / 256.0, side) - z) < margin) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- basis and solutions

std::size_t BasisInfo::columns() const {
  return 1 + 2 * std::size_t(poly_degree) + n_holes * (1 + 2 * std::size_t(hole_degree));
}

std::size_t BasisInfo::hole_offset(std::size_t j) const {
  return 1 + 2 * std::size_t(poly_degree) + j * (1 + 2 * std::size_t(hole_degree));
}

double LaplaceSolution::value(cplx z) const { return value_on(z, -1, 0.0); }

double LaplaceSolution::value_on(cplx z, int hole, cplx psi) const {
  std::vector<double> row(basis.columns());
  eval_row(*domain, basis, Point{z, -1, hole, psi}, row.data());
  double v = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c) v += coeffs[Eigen::Index(c)] * row[c];
  return v;
}

namespace {

// Σ a_b F_b(z) without log terms, plus Σ a_log log|ℓ|, and the derivative Σ a_b F_b'(z).
void analytic_eval(const LaplaceDomain& dom, const BasisInfo& b, const Eigen::VectorXd& a, cplx z, cplx* value,
                   cplx* derivative, int hole = -1, cplx psi_side = 0.0) {
  cplx f = a[0], df = 0.0;
  cplx zn = 1.0, znm1 = 1.0;
  std::size_t c = 1;
  for (int n = 1; n <= b.poly_degree; ++n) {
    znm1 = zn;
    zn *= z;
    const cplx w(a[Eigen::Index(c)], -a[Eigen::Index(c + 1)]);
    f += w * zn;
    df += w * double(n) * znm1;
    c += 2;
  }
  for (std::size_t j = 0; j < dom.holes.size(); ++j) {
    const Hole& h = dom.holes[j];
    const cplx psi = int(j) == hole ? psi_side : h.psi(z);
    const cplx ell = h.log_arg(z, psi);
    const double al = a[Eigen::Index(c++)];
    f += al * std::log(std::abs(ell));
    if (derivative) df += al * h.log_arg_derivative(z, psi) / ell;
    cplx pn = 1.0, pnm1 = 1.0;
    cplx sum_d = 0.0;
    for (int n = 1; n <= b.hole_degree; ++n) {
      pnm1 = pn;
      pn *= psi;
      const cplx w(a[Eigen::Index(c)], -a[Eigen::Index(c + 1)]);
      f += w * pn;
      sum_d += w * double(n) * pnm1;
      c += 2;
    }
    if (derivative) df += sum_d * h.psi_derivative(z, psi);
  }
  if (value) *value = f;
  if (derivative) *derivative = df;
}

}  // namespace

cplx LaplaceSolution::gradient(cplx z) const {
  cplx d;
  analytic_eval(*domain, basis, coeffs, z, nullptr, &d);
  return d;
}

cplx LaplaceSolution::analytic(cplx z) const {
  cplx v;
  analytic_eval(*domain, basis, coeffs, z, &v, nullptr);
  return v;
}

cplx LaplaceSolution::analytic_on(cplx z, int hole, cplx psi) const {
  cplx v;
  analytic_eval(*domain, basis, coeffs, z, &v, nullptr, hole, psi);
  return v;
}

double LaplaceSolution::log_coefficient(std::size_t hole) const {
  return coeffs[Eigen::Index(basis.hole_offset(hole))];
}

// ---------------------------------------------------------------- system

LaplaceSystem::LaplaceSystem(std::shared_ptr<const LaplaceDomain> domain, const LaplaceOptions& opts)
    : domain_(std::move(domain)), opts_(opts) {
  basis_.n_holes = domain_->holes.size();
}

std::vector<LaplaceSolution> LaplaceSystem::solve(std::span<const BoundaryData> data) {
  const bool fixed = opts_.poly_degree > 0;
  const int last = fixed ? 0 : opts_.max_level;
  double worst = 0.0;
  for (int level = fixed ? 0 : level_; level <= last; ++level) {
    basis_.poly_degree = fixed ? opts_.poly_degree : level_degree(level);
    basis_.hole_degree = fixed ? std::max(opts_.hole_degree, 1) : level_degree(level);
    if (fixed && opts_.hole_degree > 0) basis_.hole_degree = opts_.hole_degree;
    const auto fit_pts = boundary_points(*domain_, basis_, opts_, false);
    const auto val_pts = boundary_points(*domain_, basis_, opts_, true);
    rows_ = fit_pts.size();
    if (fit_pts.size() < basis_.columns()) {
      throw Error(ErrorCode::IllConditioned, "fewer collocation points than coefficients", -1,
                  int(fit_pts.size()), double(basis_.columns()));
    }
    const Eigen::MatrixXd a = assemble(*domain_, basis_, fit_pts);
    const Eigen::MatrixXd av = assemble(*domain_, basis_, val_pts);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    std::vector<LaplaceSolution> out;
    worst = 0.0;
    for (const auto& d : data) {
      Eigen::VectorXd b(fit_pts.size()), bv(val_pts.size());
      for (std::size_t i = 0; i < fit_pts.size(); ++i) b[Eigen::Index(i)] = d(fit_pts[i].z, fit_pts[i].component);
      for (std::size_t i = 0; i < val_pts.size(); ++i) bv[Eigen::Index(i)] = d(val_pts[i].z, val_pts[i].component);
      LaplaceSolution s;
      s.domain = domain_;
      s.basis = basis_;
      s.coeffs = cod.solve(b);
      s.fit_residual = (a * s.coeffs - b).lpNorm<Eigen::Infinity>();
      s.residual = (av * s.coeffs - bv).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, s.residual);
      out.push_back(std::move(s));
    }
    level_ = level;
    if (worst <= opts_.tol_lap || fixed) {
      if (worst > opts_.tol_lap) break;
      return out;
    }
  }
  throw Error(ErrorCode::ResidualTooLarge, "Laplace fit residual above tolerance", -1, level_, worst);
}

LaplaceSolution solve_dirichlet(const LaplaceDomain& domain, const BoundaryData& data, const LaplaceOptions& opts) {
  auto dom = std::make_shared<const LaplaceDomain>(domain);
  LaplaceSystem sys(dom, opts);
  const std::vector<BoundaryData> d{data};
  return sys.solve(d).front();
}

double period_by_coefficient(const LaplaceSolution& u, std::size_t hole) {
  // −∮ d(Im log ℓ) around the hole (counter-clockwise) is −2π per unit of winding
  const Hole& h = u.domain->holes[hole];
  const auto c = h.offset_contour(h.kind() == Hole::Kind::Jordan ? 0.05 : 0.1, 256);
  double wind = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const cplx a = h.log_arg(c[i], h.psi(c[i]));
    const cplx b = h.log_arg(c[(i + 1) % c.size()], h.psi(c[(i + 1) % c.size()]));
    wind += std::arg(b / a);
  }
  const double w = std::round(wind / kTwoPi);
  return -kTwoPi * w * u.log_coefficient(hole);
}

double period_by_contour(const LaplaceSolution& u, std::size_t hole, std::size_t n) {
  const Hole& h = u.domain->holes[hole];
  const std::size_t cols = u.basis.columns();
  if (n == 0) n = std::max<std::size_t>(4 * cols, 512);
  // half the local collocation spacing in the exterior coordinate
  const double spacing = kTwoPi / std::max(16.0, 3.0 * (2 * u.basis.hole_degree + 1));
  double delta = 0.5 * spacing;
  if (h.kind() == Hole::Kind::Jordan) delta = std::max(delta, 0.02);
  double flux = 0.0, area = 0.0;
  cplx prev;
  for (std::size_t i = 0; i <= n; ++i) {
    const double th = kTwoPi * double(i % n) / double(n);
    cplx z, dz;
    if (h.kind() == Hole::Kind::Jordan) {
      z = h.center() + std::polar(h.scale() * (1.0 + delta), th);
      dz = I * (z - h.center());
    } else {
      const cplx p = std::polar(1.0 - delta, th);
      z = h.chart_inverse(0.5 * (p + 1.0 / p));
      dz = 0.5 * (1.0 - 1.0 / (p * p)) * I * p / h.chart_derivative(z);
    }
    if (i > 0) area += prev.real() * z.imag() - z.real() * prev.imag();
    prev = z;
    if (i < n) flux += (u.gradient(z) * dz).imag() * kTwoPi / double(n);
  }
  if (area < 0.0) flux = -flux;
  return -flux;
}

}  // namespace kloewner
