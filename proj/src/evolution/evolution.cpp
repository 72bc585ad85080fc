#include "kloewner/error.hpp"
#include "kloewner/evolution.hpp"
#include "kloewner/mc_hull.hpp"
#include "kloewner/simd.hpp"
#include "kloewner/zipper.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace kloewner {

cplx mobius_kernel(cplx xi, cplx z, double guard) {
  if (std::abs(z - xi) < guard) throw Error(ErrorCode::PoleHit, "Moebius kernel at its pole", -1, -1, std::abs(z - xi));
  return (xi + z) / (xi - z);
}

// ---------------------------------------------------------------- driving

DrivingInterp::DrivingInterp(const DrivingSpec& driving) : spec_(driving) {
  validate_driving(spec_);
  for (auto& th : spec_.theta) th = unwrap_angles(th);
}

std::size_t DrivingInterp::locate(double t, double& f) const {
  const auto& g = spec_.grid;
  const double eps = 1e-12 * std::max(1.0, std::abs(g.back()));
  if (t < g.front() - eps || t > g.back() + eps) {
    throw Error(ErrorCode::InvalidDriving, "time outside the driving grid", -1, -1, t);
  }
  if (g.size() == 1) {
    f = 0.0;
    return 0;
  }
  std::size_t i = std::size_t(std::upper_bound(g.begin(), g.end(), t) - g.begin());
  i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
  f = std::clamp((t - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
  return i;
}

double DrivingInterp::theta(std::size_t k, double t) const {
  double f;
  const std::size_t i = locate(t, f);
  const auto& th = spec_.theta[k];
  return f == 0.0 ? th[i] : th[i] + f * (th[i + 1] - th[i]);
}

std::vector<double> DrivingInterp::lambda(double t) const {
  double f;
  const std::size_t i = locate(t, f);
  std::vector<double> out(slit_count());
  double sum = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& l = spec_.lambda[k];
    out[k] = f == 0.0 ? l[i] : l[i] + f * (l[i + 1] - l[i]);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Flow of marked points, an lmr accumulator and the interior slit samples of D_t.
// State layout: [points][lmr][samples of slit 0][samples of slit 1]...
class Evolver {
 public:
  Evolver(const CircularSlitDisk& domain0, const DrivingInterp& drv, const EvolutionOptions& opts, std::size_t n_points)
      : drv_(drv), opts_(opts), n_points_(n_points), n_slits_(domain0.slits.size()) {
    validate_circular_slit_disk(domain0);
    nb_ = std::max<std::size_t>(opts.boundary_samples, 8);
    nb_ += nb_ % 2;
    frozen_.assign(n_points, 0);
    lap_ = opts.laplace;
    for (const auto& s : domain0.slits) {
      const std::size_t half = nb_ / 2;
      for (std::size_t i = 0; i < nb_; ++i) {
        const std::size_t u = i <= half ? i : nb_ - i;
        const double f = 0.5 * (1.0 - std::cos(kPi * double(u) / double(half)));
        init_samples_.push_back(std::polar(s.radius, s.alpha + f * (s.beta - s.alpha)));
      }
    }
  }

  std::size_t size() const { return n_points_ + 1 + n_slits_ * nb_; }
  std::size_t lmr_index() const { return n_points_; }
  bool multiply_connected() const { return n_slits_ > 0; }
  std::vector<char>& frozen() { return frozen_; }

  std::vector<cplx> initial_state(std::span<const cplx> points) const {
    std::vector<cplx> y(points.begin(), points.end());
    y.push_back(0.0);
    y.insert(y.end(), init_samples_.begin(), init_samples_.end());
    return y;
  }

  void set_samples(std::vector<cplx>& y, std::span<const cplx> samples) const {
    std::copy(samples.begin(), samples.end(), y.begin() + long(n_points_ + 1));
  }

  // Concentric arcs through the carried samples; endpoints are samples 0 and nb/2.
  CircularSlitDisk fit(std::span<const cplx> y, double* residual = nullptr) const {
    CircularSlitDisk d;
    double res = 0.0;
    for (std::size_t j = 0; j < n_slits_; ++j) {
      const cplx* s = y.data() + n_points_ + 1 + j * nb_;
      double r = 0.0;
      for (std::size_t i = 0; i < nb_; ++i) r += std::abs(s[i]);
      r /= double(nb_);
      ArcSlit a;
      a.radius = r;
      a.alpha = std::arg(s[0]);
      double span = std::remainder(std::arg(s[nb_ / 2]) - a.alpha, kTwoPi);
      if (span <= 0.0) span += kTwoPi;
      a.beta = a.alpha + span;
      for (std::size_t i = 0; i < nb_; ++i) {
        res = std::max(res, std::abs(std::abs(s[i]) - r));
        const double off = std::remainder(std::arg(s[i]) - a.alpha - 0.5 * span, kTwoPi);
        res = std::max(res, r * std::max(0.0, std::abs(off) - 0.5 * span));
      }
      d.slits.push_back(a);
    }
    if (residual) *residual = res;
    return d;
  }

  void rhs(double t, std::span<const cplx> y, std::span<cplx> dy) const {
    const std::size_t m = drv_.slit_count();
    const std::vector<double> lam = drv_.lambda(t);
    std::vector<double> xr(m), xim(m);
    std::vector<cplx> xi(m);
    for (std::size_t k = 0; k < m; ++k) {
      xi[k] = drv_.xi(k, t);
      xr[k] = xi[k].real();
      xim[k] = xi[k].imag();
    }
    dy[lmr_index()] = 0.0;
    for (std::size_t k = 0; k < m; ++k) dy[lmr_index()] += lam[k];

    if (!multiply_connected()) {
      std::vector<double> zr(n_points_), zi(n_points_), outr(n_points_), outi(n_points_);
      for (std::size_t i = 0; i < n_points_; ++i) {
        zr[i] = y[i].real();
        zi[i] = y[i].imag();
      }
      simd::loewner_rhs(xr.data(), xim.data(), lam.data(), m, zr.data(), zi.data(), outr.data(), outi.data(),
                        n_points_);
      for (std::size_t i = 0; i < n_points_; ++i) dy[i] = frozen_[i] ? cplx(0.0) : cplx(outr[i], outi[i]);
      return;
    }

    const CircularSlitDisk d = fit(y);
    const LaplaceDomain dom = LaplaceDomain::from_slit_disk(d);
    const auto kernels = kernels_for(dom, xi);
    for (std::size_t i = 0; i < n_points_; ++i) {
      cplx v = 0.0;
      if (!frozen_[i]) {
        for (std::size_t k = 0; k < m; ++k) {
          if (std::abs(y[i] - xi[k]) < opts_.guard) {
            v = cplx(kNaN, kNaN);
            break;
          }
          v += lam[k] * kernels[k](y[i]);
        }
        v *= y[i];
      }
      dy[i] = v;
    }
    const std::size_t half = nb_ / 2;
    for (std::size_t j = 0; j < n_slits_; ++j) {
      const Hole& h = dom.holes[j];
      const ArcSlit& a = d.slits[j];
      const std::size_t base = n_points_ + 1 + j * nb_;
      for (std::size_t i = 0; i < nb_; ++i) {
        double th;
        if (i == 0) {
          th = a.alpha;
        } else if (i == half) {
          th = a.beta;
        } else {
          const double span = a.beta - a.alpha;
          const double off = std::remainder(std::arg(y[base + i]) - a.alpha - 0.5 * span, kTwoPi) + 0.5 * span;
          th = a.alpha + std::clamp(off, 0.0, span);
        }
        const cplx z = std::polar(a.radius, th);
        const double mre = std::clamp(h.chart(z).real(), -1.0, 1.0);
        cplx psi(mre, std::sqrt(1.0 - mre * mre));
        // outer side for samples 1..half−1, inner side for the rest
        const bool outer = i < half;
        const cplx probe = h.psi(z * (outer ? 1.0 + 1e-9 : 1.0 - 1e-9));
        if ((probe.imag() < 0.0) != (psi.imag() < 0.0)) psi = std::conj(psi);
        cplx v = 0.0;
        for (std::size_t k = 0; k < m; ++k) v += lam[k] * kernels[k].on_hole(z, int(j), psi);
        dy[base + i] = z * v;
      }
    }
  }

  // The basis degree is fixed after the first solve so the right-hand side stays smooth in the state.
  std::vector<KernelField> kernels_for(const LaplaceDomain& dom, std::span<const cplx> xi) const {
    if (lap_.poly_degree > 0) {
      try {
        return phi_kernels(dom, xi, lap_);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ResidualTooLarge) throw;
      }
    }
    LaplaceOptions adaptive = opts_.laplace;
    adaptive.poly_degree = adaptive.hole_degree = 0;
    auto k = phi_kernels(dom, xi, adaptive);
    lap_ = opts_.laplace;
    lap_.poly_degree = k.front().corrector.basis.poly_degree;
    lap_.hole_degree = k.front().corrector.basis.hole_degree;
    return k;
  }

  // Freezes marked points inside the guard; returns true if any changed.
  bool guard_check(double t, std::vector<cplx>& y, std::vector<double>* swallow_time) {
    bool changed = false;
    for (std::size_t i = 0; i < n_points_; ++i) {
      if (frozen_[i]) continue;
      for (std::size_t k = 0; k < drv_.slit_count(); ++k) {
        if (std::abs(y[i] - drv_.xi(k, t)) < opts_.guard || !std::isfinite(std::abs(y[i]))) {
          frozen_[i] = 1;
          if (swallow_time) (*swallow_time)[i] = t;
          changed = true;
          break;
        }
      }
    }
    return changed;
  }

  bool stall(double t, std::span<const double> err, std::vector<double>* swallow_time) {
    bool changed = false;
    for (std::size_t i = 0; i < n_points_; ++i) {
      if (!frozen_[i] && !(err[i] <= opts_.ode.tol)) {
        frozen_[i] = 1;
        if (swallow_time) (*swallow_time)[i] = t;
        changed = true;
      }
    }
    return changed;
  }

 private:
  const DrivingInterp& drv_;
  EvolutionOptions opts_;
  std::size_t n_points_;
  std::size_t n_slits_;
  std::size_t nb_ = 64;
  std::vector<cplx> init_samples_;
  std::vector<char> frozen_;
  mutable LaplaceOptions lap_;
};

std::vector<double> output_times(const DrivingInterp& drv, double T) {
  if (!(T >= drv.start()) || T > drv.end() * (1 + 1e-12) + 1e-15) {
    throw Error(ErrorCode::InvalidDriving, "horizon outside the driving grid", -1, -1, T);
  }
  std::vector<double> out;
  for (double g : drv.grid())
    if (g < T - 1e-14 * std::max(1.0, T)) out.push_back(g);
  out.push_back(T);
  return out;
}

// Slit samples of D_t at each requested time (multiply connected case).
std::vector<std::vector<cplx>> sample_history(const CircularSlitDisk& domain0, const DrivingInterp& drv,
                                              std::span<const double> times, const EvolutionOptions& opts) {
  Evolver ev(domain0, drv, opts, 0);
  std::vector<cplx> y = ev.initial_state({});
  Rk45 ode([&](double t, std::span<const cplx> s, std::span<cplx> d) { ev.rhs(t, s, d); }, opts.ode);
  std::vector<std::vector<cplx>> out;
  double t = drv.start();
  for (double ti : times) {
    if (ti > t) ode.integrate(t, ti, y, drv.grid());
    t = std::max(t, ti);
    out.emplace_back(y.begin() + 1, y.end());
  }
  return out;
}

std::vector<cplx> tips_at(const CircularSlitDisk& domain0, const DrivingInterp& drv, double t,
                          std::span<const cplx> samples, const EvolutionOptions& opts) {
  const std::size_t m = drv.slit_count();
  std::vector<cplx> tips(m);
  if (t <= drv.start()) {
    for (std::size_t k = 0; k < m; ++k) tips[k] = drv.xi(k, drv.start());
    return tips;
  }
  Evolver ev(domain0, drv, opts, 2 * m);
  std::vector<cplx> start(2 * m);
  for (std::size_t k = 0; k < m; ++k) {
    start[2 * k] = (1.0 - opts.lift) * drv.xi(k, t);
    start[2 * k + 1] = (1.0 - opts.lift_half) * drv.xi(k, t);
  }
  std::vector<cplx> y = ev.initial_state(start);
  if (ev.multiply_connected()) ev.set_samples(y, samples);
  Rk45 ode([&](double s, std::span<const cplx> st, std::span<cplx> d) { ev.rhs(s, st, d); }, opts.ode);
  ode.integrate(t, drv.start(), y, drv.grid());
  // the lift error is quadratic in ε
  const double q = opts.lift / opts.lift_half;
  const double w = q * q;
  for (std::size_t k = 0; k < m; ++k) tips[k] = (w * y[2 * k + 1] - y[2 * k]) / (w - 1.0);
  return tips;
}

}  // namespace

// ---------------------------------------------------------------- forward flow

EvolutionTrace solve_forward(const CircularSlitDisk& domain0, const DrivingSpec& driving, std::span<const cplx> marked,
                             double T, const EvolutionOptions& opts) {
  const DrivingInterp drv(driving);
  const LaplaceDomain dom0 = LaplaceDomain::from_slit_disk(domain0);
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (!dom0.contains(marked[i], opts.guard)) {
      throw Error(ErrorCode::OutsideDomain, "marked point outside the initial domain", -1, int(i));
    }
  }
  Evolver ev(domain0, drv, opts, marked.size());
  std::vector<cplx> y = ev.initial_state(marked);
  Rk45 ode([&](double t, std::span<const cplx> s, std::span<cplx> d) { ev.rhs(t, s, d); }, opts.ode);

  EvolutionTrace tr;
  tr.times = output_times(drv, T);
  tr.swallow_time.assign(marked.size(), kNaN);
  auto record = [&](double t) {
    tr.points.emplace_back(y.begin(), y.begin() + long(marked.size()));
    double res = 0.0;
    tr.domains.push_back(ev.fit(y, &res));
    tr.arc_fit_residual.push_back(res);
    tr.lmr.push_back(y[ev.lmr_index()].real());
    std::vector<cplx> xi;
    for (std::size_t k = 0; k < drv.slit_count(); ++k) xi.push_back(drv.xi(k, t));
    tr.xi.push_back(std::move(xi));
    tr.lambda.push_back(drv.lambda(t));
  };
  record(tr.times.front());
  auto hook = [&](double t, std::vector<cplx>& s) { return ev.guard_check(t, s, &tr.swallow_time); };
  auto stall = [&](double t, std::vector<cplx>&, std::span<const double> err) {
    return ev.stall(t, err, &tr.swallow_time);
  };
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    ode.integrate(tr.times[i - 1], tr.times[i], y, {}, hook, stall);
    record(tr.times[i]);
  }
  tr.stats = ode.stats();
  tr.swallowed.resize(marked.size());
  for (std::size_t i = 0; i < marked.size(); ++i) {
    tr.swallowed[i] = ev.frozen()[i] != 0;
    tr.truncated = tr.truncated || tr.swallowed[i];
  }
  if (opts.trace_tips) {
    const auto curves = trace_hull(domain0, driving, T, opts, tr.times);
    for (const auto& c : curves) {
      std::vector<cplx> tips;
      for (const auto& s : c.samples) tips.push_back(s.z);
      tr.tips.push_back(std::move(tips));
    }
  }
  return tr;
}

// ---------------------------------------------------------------- hull tracing

std::vector<SlitCurve> trace_hull(const CircularSlitDisk& domain0, const DrivingSpec& driving, double T,
                                  const EvolutionOptions& opts, std::span<const double> times) {
  const DrivingInterp drv(driving);
  std::vector<double> ts = times.empty() ? output_times(drv, T) : std::vector<double>(times.begin(), times.end());
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) throw Error(ErrorCode::InvalidInput, "trace times must increase", -1, int(i));
  }
  std::vector<std::vector<cplx>> history;
  if (!domain0.is_disk()) history = sample_history(domain0, drv, ts, opts);

  std::vector<std::vector<cplx>> tips(ts.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < ts.size(); i += step) {
      tips[i] = tips_at(domain0, drv, ts[i], history.empty() ? std::span<const cplx>{} : history[i], opts);
    }
  };
  const std::size_t threads = std::max(1, opts.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t th = 0; th < threads; ++th) jobs.push_back(std::async(std::launch::async, work, th, threads));
    for (auto& j : jobs) j.get();
  }

  std::vector<SlitCurve> out(drv.slit_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].slit_index = int(k);
    for (std::size_t i = 0; i < ts.size(); ++i) out[k].samples.push_back({ts[i], tips[i][k]});
  }
  return out;
}

// ---------------------------------------------------------------- extraction and round trip

DrivingSpec extract_driving(const HullConfig& config, std::span<const double> grid, const CapacityOptions& opts) {
  validate_hull_config(config);
  const std::size_t m = config.curves.size();
  const auto geo = std::make_shared<const HullGeometry>(HullGeometry::build(config, opts.scmap));
  const auto w = weights(config, grid, 0.0, opts);

  ZipperBuilder zb(*geo, false);
  std::vector<HoleTemplate> holes;
  std::vector<std::size_t> offsets;
  for (const auto& s : config.initial_domain.slits) {
    holes.push_back(HoleTemplate::from_arc(s));
    offsets.push_back(zb.tracked_count());
    zb.add_tracked(holes.back().samples);
  }
  LaplaceOptions lo;
  lo.tol_lap = opts.tol_lap;

  DrivingSpec d;
  d.grid.assign(grid.begin(), grid.end());
  d.theta.assign(m, {});
  d.lambda.assign(m, {});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> tg(m);
    for (std::size_t k = 0; k < m; ++k) tg[k] = std::min(grid[i], geo->end_time(k));
    zb.advance(tg);
    std::vector<cplx> xi(m);
    for (std::size_t k = 0; k < m; ++k) xi[k] = zb.tip_image(k);
    if (!holes.empty()) {
      LaplaceDomain dom;
      for (std::size_t j = 0; j < holes.size(); ++j) {
        std::vector<cplx> pts;
        for (std::size_t p = 0; p < holes[j].samples.size(); ++p) pts.push_back(zb.tracked(offsets[j] + p));
        dom.holes.push_back(Hole::arc(std::move(pts)));
      }
      const auto F = canonical_slit_disk_map(dom, 0.0, lo);
      for (auto& x : xi) x = F(x);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) sum += w.lambda[k][i];
    for (std::size_t k = 0; k < m; ++k) {
      d.theta[k].push_back(std::arg(xi[k]));
      d.lambda[k].push_back(w.lambda[k][i] / sum);
    }
  }
  for (auto& th : d.theta) th = unwrap_angles(th);
  return d;
}

double hausdorff_distance(std::span<const cplx> a, std::span<const cplx> b) {
  auto seg_dist = [](cplx p, cplx u, cplx v) {
    const cplx d = v - u;
    const double l2 = std::norm(d);
    const double s = l2 > 0.0 ? std::clamp(((p - u) * std::conj(d)).real() / l2, 0.0, 1.0) : 0.0;
    return std::abs(p - (u + s * d));
  };
  auto directed = [&](std::span<const cplx> from, std::span<const cplx> to) {
    double worst = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      for (int sub = 0; sub < 4; ++sub) {
        if (i + 1 == from.size() && sub > 0) break;
        const cplx p = i + 1 < from.size() ? from[i] + (from[i + 1] - from[i]) * (sub / 4.0) : from[i];
        double best = to.size() == 1 ? std::abs(p - to[0]) : std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < to.size(); ++j) best = std::min(best, seg_dist(p, to[j], to[j + 1]));
        worst = std::max(worst, best);
      }
    }
    return worst;
  };
  if (a.empty() || b.empty()) return 0.0;
  return std::max(directed(a, b), directed(b, a));
}

RoundtripReport roundtrip_residual(const HullConfig& config, std::size_t n_grid, const EvolutionOptions& eopts,
                                   const CapacityOptions& copts) {
  validate_hull_config(config);
  RoundtripReport rep;
  double T = config.horizon;
  for (const auto& c : config.curves) T = std::min(T, c.end_time());
  const std::size_t m = config.curves.size();
  rep.hausdorff.assign(m, 0.0);
  if (m == 0 || T <= 0.0) return rep;
  n_grid = std::max<std::size_t>(n_grid, 2);
  std::vector<double> grid(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) grid[i] = T * double(i) / double(n_grid - 1);
  grid.back() = T;

  rep.driving = extract_driving(config, grid, copts);
  rep.traced = trace_hull(config.initial_domain, rep.driving, T, eopts, grid);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<cplx> orig;
    for (const auto& s : config.curves[k].samples)
      if (s.t < T) orig.push_back(s.z);
    orig.push_back(sample_curve(config.curves[k], T));
    std::vector<cplx> traced;
    for (const auto& s : rep.traced[k].samples) traced.push_back(s.z);
    rep.hausdorff[k] = hausdorff_distance(orig, traced);
  }

  HullConfig back;
  back.curves = rep.traced;
  back.initial_domain = config.initial_domain;
  back.horizon = T;
  const DrivingSpec again = extract_driving(back, grid, copts);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rep.xi_mismatch = std::max(rep.xi_mismatch, std::abs(std::polar(1.0, again.theta[k][i]) -
                                                           std::polar(1.0, rep.driving.theta[k][i])));
      rep.lambda_mismatch = std::max(rep.lambda_mismatch, std::abs(again.lambda[k][i] - rep.driving.lambda[k][i]));
    }
  }
  rep.driving_mismatch = std::max(rep.xi_mismatch, rep.lambda_mismatch);
  return rep;
}

}  // namespace kloewner
