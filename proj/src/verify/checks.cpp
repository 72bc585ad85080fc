#include "kloewner/capacity.hpp"
#include "kloewner/error.hpp"
#include "kloewner/evolution.hpp"
#include "kloewner/mc_hull.hpp"
#include "kloewner/mckernel.hpp"
#include "kloewner/scmap.hpp"
#include "kloewner/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

namespace kloewner::verify {
namespace {

using io::json;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

EvolutionOptions evolution_options(const VerifyOptions& o) {
  EvolutionOptions e;
  e.threads = o.threads;
  return e;
}

CheckResult radial_law(const json& fx, const VerifyOptions& o) {
  const auto t0 = Clock::now();
  const DrivingSpec d = io::driving_from_json(fx.at("driving"));
  const std::vector<double> law_times = doubles(fx.at("times"));
  const double T = d.grid.back();
  std::vector<double> times = law_times;
  for (int i = 1; i <= 40; ++i) times.push_back(T * i / 40.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto curves = trace_hull({}, d, T, evolution_options(o), times);
  const double theta = d.theta[0][0];
  double angle = 0.0, law = 0.0;
  for (const auto& s : curves.at(0).samples) {
    angle = std::max(angle, std::abs(std::remainder(std::arg(s.z) - theta, kTwoPi)));
    if (std::find(law_times.begin(), law_times.end(), s.t) != law_times.end()) {
      const double r = std::abs(s.z);
      law = std::max(law, std::abs(4.0 * r / ((1.0 + r) * (1.0 + r)) - std::exp(-s.t)));
    }
  }
  CheckResult r;
  r.seconds = seconds_since(t0);
  r.value = law;
  r.tolerance = 1e-5;
  r.passed = law <= 1e-5 && angle < 1e-4 && r.seconds < 10.0;
  r.detail = fmt("max angular deviation %.3g rad (tol 1e-4)", angle) + (r.seconds < 10.0 ? "" : "; runtime over 10 s");
  return r;
}

CheckResult weight_sum(const json& fx, const VerifyOptions&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < fx.at("configs").size(); ++i) {
    const HullConfig cfg = io::hull_config_from_json(fx["configs"][i]);
    const std::vector<double> grid = doubles(fx.at("grids")[i]);
    const WeightEstimate w = weights(cfg, grid);
    for (double s : w.sum_lambda) worst = std::max(worst, std::abs(s - 1.0));
    n += grid.size();
  }
  CheckResult r;
  r.seconds = seconds_since(t0);
  r.value = worst;
  r.tolerance = 1e-3;
  r.passed = worst <= 1e-3 && r.seconds < 120.0;
  r.detail = fmt("max |sum lambda - 1| over %g grid points", double(n)) + (r.seconds < 120.0 ? "" : "; runtime over 2 min");
  return r;
}

CheckResult symmetry(const json& fx, const VerifyOptions&) {
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  const std::vector<double> grid = doubles(fx.at("grid"));
  const WeightEstimate w = weights(cfg, grid);
  const CapacityProfile p = capacity_profile(cfg, grid);
  double dl = 0.0, dc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dl = std::max({dl, std::abs(w.lambda[0][i] - 0.5), std::abs(w.lambda[1][i] - 0.5)});
    dc = std::max(dc, std::abs(p.c[0][i] - p.c[1][i]));
  }
  CheckResult r;
  r.value = dl;
  r.tolerance = 1e-3;
  r.passed = dl <= 1e-3 && dc <= 1e-6;
  r.detail = fmt("max |lambda_k - 1/2|; max |c_1 - c_2| = %.3g (tol 1e-6)", dc);
  return r;
}

CheckResult capacity_identity(const json& fx, const VerifyOptions&) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fx.at("configs").size(); ++i) {
    const HullConfig cfg = io::hull_config_from_json(fx["configs"][i]);
    const std::vector<double> grid = doubles(fx.at("grids")[i]);
    const CapacityProfile p = capacity_profile(cfg, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double s = 0.0;
      for (const auto& ck : p.c) s += ck[g];
      worst = std::max(worst, std::abs(s - grid[g]));
    }
  }
  CheckResult r;
  r.value = worst;
  r.tolerance = 1e-3;
  r.passed = worst <= 1e-3;
  r.detail = "max |sum c_k(t) - t| on the weight-sum fixtures";
  return r;
}

CheckResult telescoping(const json& fx, const VerifyOptions&) {
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  double worst = 0.0;
  for (double t : doubles(fx.at("times"))) {
    const std::vector<double> tr{t};
    const double target = lmr(build_hull_map(cfg, tr));
    for (const auto& pj : fx.at("partitions")) {
      Partition z;
      for (double u : doubles(pj)) z.knots.push_back(u * t);
      worst = std::max(worst, std::abs(partition_sum(cfg, 0, 0.0, t, z) - target));
    }
  }
  CheckResult r;
  r.value = worst;
  r.tolerance = 1e-10;
  r.passed = worst <= 1e-10;
  r.detail = "max |partition sum - lmr(g_t)| over partitions and times";
  return r;
}

CheckResult monotonicity(const json& fx, const VerifyOptions&) {
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  std::size_t bad = 0, n = 0;
  double margin = INFINITY;
  for (const auto& p : fx.at("pairs")) {
    const int k = p.at("slit").get<int>();
    const auto t = doubles(p.at("t")), tau = doubles(p.at("tau"));
    const double a = lmr_f(cfg, k, t[0], tau[0]);
    const double b = lmr_f(cfg, k, t[1], tau[0]);
    const double c = lmr_f(cfg, k, t[0], tau[1]);
    if (!(b > a)) ++bad;
    if (!(c > a)) ++bad;
    margin = std::min({margin, b - a, c - a});
    ++n;
  }
  CheckResult r;
  r.value = double(bad);
  r.tolerance = 0.0;
  r.passed = bad == 0;
  r.detail = fmt("violations over %g pairs; smallest increase %.3g", double(n), margin);
  return r;
}

CheckResult roundtrip(const json& fx, const VerifyOptions& o) {
  const auto t0 = Clock::now();
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  const auto rep = roundtrip_residual(cfg, fx.value("n_grid", 33), evolution_options(o));
  const double h = *std::max_element(rep.hausdorff.begin(), rep.hausdorff.end());
  CheckResult r;
  r.seconds = seconds_since(t0);
  r.value = h;
  r.tolerance = 1e-2;
  r.passed = h <= 1e-2 && rep.driving_mismatch <= 1e-2 && r.seconds < 300.0;
  r.detail = fmt("max Hausdorff; driving sup-mismatch %.3g (tol 1e-2)", rep.driving_mismatch) +
             (r.seconds < 300.0 ? "" : "; runtime over 5 min");
  return r;
}

CheckResult kernel_disk(const json& fx, const VerifyOptions&) {
  const double rad = fx.at("radius").get<double>();
  const int count = fx.at("count").get<int>();
  double worst = 0.0;
  for (const auto& zj : fx.at("zetas")) {
    const cplx zeta = io::complex_from_json(zj);
    const KernelField phi = phi_kernel(CircularSlitDisk{}, zeta);
    for (int i = 0; i < count; ++i) {
      const cplx z = std::polar(rad, kTwoPi * (i + 0.5) / count);
      worst = std::max(worst, std::abs(phi(z) - (zeta + z) / (zeta - z)));
    }
  }
  CheckResult r;
  r.value = worst;
  r.tolerance = 1e-6;
  r.passed = worst <= 1e-6;
  r.detail = "max |Phi - (zeta+z)/(zeta-z)| on the test circle";
  return r;
}

CheckResult kernel_structure(const json& fx, const VerifyOptions&) {
  const CircularSlitDisk dom = io::slit_disk_from_json(fx.at("domain"));
  const cplx zeta = io::complex_from_json(fx.at("zeta"));
  const double away = fx.at("away").get<double>();
  const KernelField phi = phi_kernel(dom, zeta);

  double outer = 0.0;
  for (int i = 0; i < 720; ++i) {
    const double th = kTwoPi * (i + 0.5) / 720.0;
    if (std::abs(std::remainder(th - std::arg(zeta), kTwoPi)) < away) continue;
    outer = std::max(outer, std::abs(phi(std::polar(1.0, th)).real()));
  }

  const LaplaceDomain ld = LaplaceDomain::from_slit_disk(dom);
  double rel = 0.0;
  for (std::size_t j = 0; j < ld.holes.size(); ++j) {
    std::vector<double> v;
    for (int i = 0; i < 400; ++i) {
      cplx psi;
      const cplx z = ld.holes[j].boundary_point(kTwoPi * (i + 0.5) / 400.0, psi);
      v.push_back(phi.on_hole(z, int(j), psi).real());
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    rel = std::max(rel, std::sqrt(var / double(v.size())) / std::abs(mean));
  }

  const double origin = std::abs(phi(0.0) - 1.0);
  double min_eig = INFINITY;
  for (const auto& dj : fx.at("period_domains")) {
    const HarmonicBundle b = harmonic_bundle(io::slit_disk_from_json(dj));
    for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) min_eig = std::min(min_eig, b.eigenvalues[i]);
  }

  CheckResult r;
  r.value = outer;
  r.tolerance = 1e-4;
  r.passed = outer <= 1e-4 && rel <= 1e-4 && origin <= 1e-14 && min_eig > 0.0;
  r.detail = "max |Re Phi| on the outer circle; slit std/mean " + fmt("%.3g (tol 1e-4)", rel) +
             fmt(", |Phi(0) - 1| %.3g, min period eigenvalue %.4g", origin, min_eig);
  return r;
}

CheckResult window_ratio(const json& fx, const VerifyOptions&) {
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  const double t0 = fx.at("t0").get<double>();
  const std::vector<double> win = doubles(fx.at("windows"));
  double terminal = 0.0;
  bool monotone = true;
  std::string dev;
  for (int k = 0; k < int(cfg.curves.size()); ++k) {
    double prev = INFINITY;
    for (double d : win) {
      const double e = std::abs(ratio_diagnostic(cfg, k, t0, t0 + d, t0, t0 + d) - 1.0);
      if (!(e < prev)) monotone = false;
      prev = e;
      dev += fmt(dev.empty() ? "%.3g" : " %.3g", e);
    }
    terminal = std::max(terminal, prev);
  }
  CheckResult r;
  r.value = terminal;
  r.tolerance = 5e-3;
  r.passed = monotone && terminal <= 5e-3;
  r.detail = std::string("terminal |ratio - 1|; deviations per slit and window: ") + dev +
             (monotone ? " (monotone)" : " (not monotone)");
  return r;
}

CheckResult power_bound(const json& fx, const VerifyOptions&) {
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  const std::size_t m = cfg.curves.size();
  std::size_t bad = 0, tested = 0;
  double delta_max = 0.0, tight = INFINITY;
  for (double t : doubles(fx.at("times"))) {
    for (double h : doubles(fx.at("steps"))) {
      const std::vector<double> a(m, t), b(m, std::min(t + h, cfg.horizon));
      const ConformalMapRep g0 = build_hull_map(cfg, a);
      const ConformalMapRep g1 = build_hull_map(cfg, b);
      // sector centred in the widest gap between driving points
      std::vector<double> ang;
      for (const cplx& x : g0.tip_images) ang.push_back(normalize_angle(std::arg(x)));
      for (const cplx& x : g1.tip_images) ang.push_back(normalize_angle(std::arg(x)));
      std::sort(ang.begin(), ang.end());
      double gap = ang.front() + kTwoPi - ang.back(), mid = ang.back() + 0.5 * gap;
      for (std::size_t i = 1; i < ang.size(); ++i)
        if (ang[i] - ang[i - 1] > gap) {
          gap = ang[i] - ang[i - 1];
          mid = ang[i - 1] + 0.5 * gap;
        }
      const auto f = [&](cplx w, cplx* df) {
        const cplx u = g0.evaluate_inverse(w);
        if (df) *df = g1.derivative(u) * g0.inverse_derivative(w);
        return g1.evaluate(u);
      };
      for (double eps : doubles(fx.at("eps"))) {
        const AnnularSector sec = AnnularSector::around(std::polar(1.0, mid), eps);
        // δ from the sup of |d/dz log(f(z)/z)| on a fine fitting grid
        double delta = 0.0;
        for (const cplx& z : sec.sample(48, 96, false)) {
          cplx df;
          const cplx fz = f(z, &df);
          delta = std::max(delta, std::abs(df / fz - 1.0 / z));
        }
        delta *= 1.01;
        delta_max = std::max(delta_max, delta);
        for (const cplx& z : sec.sample(17, 33, false)) {
          const double r = std::abs(z), fr = std::abs(f(z, nullptr));
          const double lo = std::pow(r, 1.0 + delta), hi = std::pow(r, 1.0 - delta);
          if (fr < lo - 1e-12 || fr > hi + 1e-12) ++bad;
          if (r < 1.0) tight = std::min({tight, (fr - lo) / (hi - lo), (hi - fr) / (hi - lo)});
          ++tested;
        }
      }
    }
  }
  CheckResult r;
  r.value = double(bad);
  r.tolerance = 0.0;
  r.passed = bad == 0;
  r.detail = fmt("violations over %g sector points; largest fitted delta %.3g", double(tested), delta_max) +
             fmt(", tightest relative margin %.3g", tight);
  return r;
}

CheckResult reduction(const json& fx, const VerifyOptions&) {
  const HullConfig cfg = io::hull_config_from_json(fx.at("config"));
  const cplx hc = io::complex_from_json(fx.at("hole").at("center"));
  const double hr = fx.at("hole").at("radius").get<double>();
  const std::vector<double> grid = doubles(fx.at("grid"));

  auto geo = std::make_shared<const HullGeometry>(HullGeometry::build(cfg));
  const auto direct = make_mc_oracle(geo, {HoleTemplate::from_circle(hc, hr)});
  const WeightEstimate wd = weights(geo, *direct, grid);

  LaplaceDomain dom;
  dom.holes.push_back(Hole::circle(hc, hr));
  const CanonicalMap h = canonical_slit_disk_map(dom, 0.0);
  HullConfig red = cfg;
  red.initial_domain = h.image;
  for (auto& c : red.curves) {
    for (auto& s : c.samples) s.z = h(s.z);
    c.samples[0].z /= std::abs(c.samples[0].z);
  }
  const WeightEstimate wr = weights(red, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = 0; k < cfg.curves.size(); ++k) worst = std::max(worst, std::abs(wd.lambda[k][i] - wr.lambda[k][i]));
  CheckResult r;
  r.value = worst;
  r.tolerance = 5e-3;
  r.passed = worst <= 5e-3;
  r.detail = fmt("max |lambda direct - lambda reduced|; canonical map residual %.3g", h.residual);
  return r;
}

using CheckFn = std::function<CheckResult(const json&, const VerifyOptions&)>;

struct Entry {
  CheckInfo info;
  CheckFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {{"A1", "radial capacity law", "A1"}, radial_law},
      {{"A2", "weight normalization", "A2"}, weight_sum},
      {{"A3", "symmetric pair", "A3"}, symmetry},
      {{"A4", "capacity identity", "A2"}, capacity_identity},
      {{"A5", "telescoping oracle", "A5"}, telescoping},
      {{"A6", "monotonicity", "A6"}, monotonicity},
      {{"A7", "round trip", "A7"}, roundtrip},
      {{"A8", "kernel degeneracy", "A8"}, kernel_disk},
      {{"A9", "kernel structure", "A9"}, kernel_structure},
      {{"A10", "window ratio", "A10"}, window_ratio},
      {{"A11", "power bound", "A11"}, power_bound},
      {{"A12", "lambda invariance under reduction", "A12"}, reduction},
  };
  return r;
}

const Entry& entry(const std::string& id) {
  for (const auto& e : registry())
    if (e.info.id == id) return e;
  throw Error(ErrorCode::InvalidInput, "unknown check " + id);
}

}  // namespace

const std::vector<CheckInfo>& list_checks() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const CheckInfo& check_info(const std::string& id) { return entry(id).info; }

CheckResult run_check(const std::string& id, const VerifyOptions& opts) {
  const Entry& e = entry(id);
  const auto t0 = Clock::now();
  CheckResult r;
  try {
    const auto it = opts.fixtures.find(e.info.fixture);
    const json fx = it != opts.fixtures.end() ? it->second : default_fixture(e.info.fixture);
    r = e.fn(fx, opts);
  } catch (const Error& err) {
    r.passed = false;
    r.value = NAN;
    r.detail = err.what();
  } catch (const json::exception& err) {
    r.passed = false;
    r.value = NAN;
    r.detail = std::string("fixture: ") + err.what();
  }
  r.id = e.info.id;
  r.name = e.info.name;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CheckResult> run_suite(const std::vector<std::string>& ids, const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  if (ids.empty()) {
    for (const auto& c : list_checks()) out.push_back(run_check(c.id, opts));
  } else {
    for (const auto& id : ids) out.push_back(run_check(id, opts));
  }
  return out;
}

std::string format_result(const CheckResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-4s %s  %-34s value=%-10.3g tol=%-8.3g %7.2fs  ", r.id.c_str(),
                r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value, r.tolerance, r.seconds);
  return buf + r.detail;
}

json to_json(const CheckResult& r) {
  return {{"id", r.id},
          {"name", r.name},
          {"passed", r.passed},
          {"value", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
          {"tolerance", r.tolerance},
          {"detail", r.detail}};
}

}  // namespace kloewner::verify
