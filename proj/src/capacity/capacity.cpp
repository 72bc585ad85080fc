#include "kloewner/capacity.hpp"

#include "kloewner/error.hpp"
#include "kloewner/zipper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kloewner {
namespace {

class ZipperOracle final : public LmrOracle {
 public:
  explicit ZipperOracle(std::shared_ptr<const HullGeometry> geometry)
      : geometry_(std::move(geometry)), builder_(*geometry_, false) {}

  void advance(std::span<const double> targets, std::span<const double> breaks) override {
    builder_.advance(targets, breaks);
  }
  double lmr() override { return builder_.lmr(); }
  double probe(std::size_t k, double t) override { return builder_.probe_lmr(k, t); }
  std::unique_ptr<LmrOracle> clone() const override { return std::make_unique<ZipperOracle>(*this); }
  std::size_t slit_count() const override { return builder_.slit_count(); }

 private:
  std::shared_ptr<const HullGeometry> geometry_;
  ZipperBuilder builder_;
};

struct Sweep {
  std::shared_ptr<const HullGeometry> geometry;
  std::unique_ptr<LmrOracle> proto;

  std::vector<double> targets(double t) const {
    std::vector<double> out(geometry->slit_count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::clamp(t, 0.0, geometry->end_time(k));
    return out;
  }
  double clamp(std::size_t k, double t) const { return std::min(t, geometry->end_time(k)); }
  double common_end() const {
    double e = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < geometry->slit_count(); ++k) e = std::min(e, geometry->end_time(k));
    return e;
  }
};

Sweep make_sweep(const HullConfig& config, const CapacityOptions& opts) {
  Sweep s;
  s.geometry = std::make_shared<const HullGeometry>(HullGeometry::build(config, opts.scmap));
  s.proto = make_lmr_oracle(s.geometry, config.initial_domain, opts);
  return s;
}

void check_slit(const HullConfig& config, int k) {
  if (k < 0 || std::size_t(k) >= config.curves.size()) throw Error(ErrorCode::OutOfRange, "slit index", k);
}

double lmr_f_geo(const Sweep& sw, std::size_t k, double t, double tau) {
  auto o = sw.proto->clone();
  auto tg = sw.targets(tau);
  tg[k] = sw.clamp(k, t);
  o->advance(tg);
  return o->lmr();
}

// Derivative of a sampled function on a nonuniform grid, second order where possible.
std::vector<double> differentiate(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  auto three = [&](std::size_t i0, double at) {
    const double x0 = x[i0], x1 = x[i0 + 1], x2 = x[i0 + 2];
    return y[i0] * (2 * at - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           y[i0 + 1] * (2 * at - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           y[i0 + 2] * (2 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
  };
  d[0] = three(0, x[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three(i - 1, x[i]);
  d[n - 1] = three(n - 3, x[n - 1]);
  return d;
}

}  // namespace

std::unique_ptr<LmrOracle> make_lmr_oracle(std::shared_ptr<const HullGeometry> geometry,
                                           const CircularSlitDisk& domain, const CapacityOptions& opts) {
  if (!domain.is_disk()) return make_mc_lmr_oracle(std::move(geometry), domain, opts);
  return std::make_unique<ZipperOracle>(std::move(geometry));
}

std::unique_ptr<LmrOracle> make_lmr_oracle(const HullConfig& config, const CapacityOptions& opts) {
  auto geo = std::make_shared<const HullGeometry>(HullGeometry::build(config, opts.scmap));
  return make_lmr_oracle(std::move(geo), config.initial_domain, opts);
}

double lmr_f(const HullConfig& config, int k, double t, double tau, const CapacityOptions& opts) {
  check_slit(config, k);
  return lmr_f_geo(make_sweep(config, opts), std::size_t(k), t, tau);
}

double partition_sum(const HullConfig& config, int k, double t_minus, double t_plus, const Partition& z,
                     const CapacityOptions& opts) {
  check_slit(config, k);
  if (z.knots.size() < 2) throw Error(ErrorCode::DegeneratePartition, "partition needs at least two knots");
  const double scale = 1e-12 * std::max(1.0, std::abs(t_plus));
  if (std::abs(z.knots.front() - t_minus) > scale || std::abs(z.knots.back() - t_plus) > scale) {
    throw Error(ErrorCode::DegeneratePartition, "partition does not span the interval");
  }
  for (std::size_t i = 1; i < z.knots.size(); ++i) {
    if (!(z.knots[i] > z.knots[i - 1])) throw Error(ErrorCode::DegeneratePartition, "knots not increasing");
  }
  if (t_minus < 0.0) throw Error(ErrorCode::OutOfRange, "negative interval start", k, -1, t_minus);
  Sweep sw = make_sweep(config, opts);
  if (t_plus > sw.common_end() * (1 + 1e-14)) {
    throw Error(ErrorCode::TruncationOutOfRange, "interval beyond common horizon", k, -1, t_plus);
  }
  auto o = sw.proto->clone();
  o->advance(sw.targets(z.knots.front()));
  const std::size_t kk = std::size_t(k);
  double sum = 0.0;
  for (std::size_t l = 0; l + 1 < z.knots.size(); ++l) {
    const double before = o->lmr();
    sum += o->probe(kk, sw.clamp(kk, z.knots[l + 1])) - before;
    o->advance(sw.targets(z.knots[l + 1]));
  }
  return sum;
}

CapacityProfile capacity_profile(const HullConfig& config, std::span<const double> grid,
                                 const CapacityOptions& opts) {
  if (grid.empty()) throw Error(ErrorCode::InvalidInput, "empty grid");
  Sweep sw = make_sweep(config, opts);
  const std::size_t m = sw.geometry->slit_count();
  const double t_end = sw.common_end();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > t_end * (1 + 1e-14)) {
      throw Error(ErrorCode::OutOfRange, "grid time outside the common horizon", -1, int(i), grid[i]);
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidInput, "grid not increasing", -1, int(i));
  }

  std::vector<double> base{0.0};
  for (double t : grid)
    if (t > base.back()) base.push_back(t);
  std::vector<std::size_t> grid_pos(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid_pos[i] = std::size_t(std::lower_bound(base.begin(), base.end(), grid[i]) - base.begin());

  CapacityProfile prof;
  prof.grid.assign(grid.begin(), grid.end());
  prof.lmr.assign(base.size(), 0.0);

  const std::size_t cells = m * base.size();
  // romberg[d][j][cell]
  std::vector<std::vector<std::vector<double>>> romberg;
  std::vector<double> best_prev, gap_cell(cells, 0.0);
  int depth = 0;
  for (;; ++depth) {
    const std::size_t sub = std::size_t(1) << depth;
    std::vector<double> raw(cells, 0.0);
    std::vector<double> acc(m, 0.0);
    auto o = sw.proto->clone();
    o->advance(sw.targets(0.0));
    for (std::size_t b = 0; b + 1 < base.size(); ++b) {
      for (std::size_t s = 0; s < sub; ++s) {
        const double t1 = s + 1 == sub ? base[b + 1]
                                       : base[b] + (base[b + 1] - base[b]) * double(s + 1) / double(sub);
        const double before = o->lmr();
        for (std::size_t k = 0; k < m; ++k) acc[k] += o->probe(k, sw.clamp(k, t1)) - before;
        o->advance(sw.targets(t1));
      }
      for (std::size_t k = 0; k < m; ++k) raw[k * base.size() + b + 1] = acc[k];
      if (depth == 0) prof.lmr[b + 1] = o->lmr();
    }
    prof.raw_levels.push_back(raw);

    std::vector<std::vector<double>> row{raw};
    const int cols = std::min(depth, std::max(opts.richardson, 0));
    for (int j = 1; j <= cols; ++j) {
      const double f = std::ldexp(1.0, j) - 1.0;
      std::vector<double> r(cells);
      for (std::size_t c = 0; c < cells; ++c) r[c] = row[j - 1][c] + (row[j - 1][c] - romberg.back()[j - 1][c]) / f;
      row.push_back(std::move(r));
    }
    romberg.push_back(row);
    const std::vector<double>& best = row.back();

    double gap = std::numeric_limits<double>::infinity();
    if (!best_prev.empty()) {
      gap = 0.0;
      for (std::size_t c = 0; c < cells; ++c) {
        gap_cell[c] = std::abs(best[c] - best_prev[c]);
        gap = std::max(gap, gap_cell[c]);
      }
    }
    best_prev = best;
    if (depth >= opts.min_depth && gap < opts.tol) break;
    if (depth >= opts.max_depth) {
      throw Error(ErrorCode::NoConvergence, "capacity refinement stalled above tolerance", -1, depth, gap);
    }
  }

  prof.depth = depth;
  double norm = 0.0;
  for (std::size_t b = 0; b + 1 < base.size(); ++b) norm = std::max(norm, base[b + 1] - base[b]);
  prof.final_norm = norm / double(std::size_t(1) << depth);

  prof.c.assign(m, std::vector<double>(grid.size()));
  prof.cauchy_gap.assign(grid.size(), 0.0);
  std::vector<double> lmr_grid(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lmr_grid[i] = prof.lmr[grid_pos[i]];
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t c = k * base.size() + grid_pos[i];
      prof.c[k][i] = best_prev[c];
      prof.cauchy_gap[i] = std::max(prof.cauchy_gap[i], gap_cell[c]);
    }
  }
  prof.lmr = std::move(lmr_grid);
  prof.lambda.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    prof.lambda[k] = differentiate(prof.grid, prof.c[k]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (prof.c[k][i] < prof.c[k][i - 1] - 1e-12) prof.monotone = false;
    }
  }
  return prof;
}

namespace {

WeightEstimate weights_sweep(const Sweep& sw, std::span<const double> grid, double h) {
  if (grid.empty()) throw Error(ErrorCode::InvalidInput, "empty grid");
  const std::size_t m = sw.geometry->slit_count();
  const double t_end = sw.common_end();

  std::vector<double> knots;
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& s : sw.geometry->knots(k)) knots.push_back(s.t);
  std::sort(knots.begin(), knots.end());

  WeightEstimate w;
  w.grid.assign(grid.begin(), grid.end());
  w.lambda.assign(m, std::vector<double>(grid.size(), 0.0));
  w.left = w.right = w.gap = w.lambda;
  w.sum_lambda.assign(grid.size(), 0.0);
  w.lmr.assign(grid.size(), 0.0);
  w.h.assign(grid.size(), 0.0);

  auto main = sw.proto->clone();
  double main_time = 0.0;
  main->advance(sw.targets(0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (t < 0.0 || t > t_end * (1 + 1e-14)) {
      throw Error(ErrorCode::OutOfRange, "grid time outside the common horizon", -1, int(i), t);
    }
    if (i > 0 && !(t > grid[i - 1])) throw Error(ErrorCode::InvalidInput, "grid not increasing", -1, int(i));
    double spacing = std::numeric_limits<double>::infinity();
    if (i > 0) spacing = std::min(spacing, t - grid[i - 1]);
    if (i + 1 < grid.size()) spacing = std::min(spacing, grid[i + 1] - t);
    double hi = h > 0.0 ? h : std::min(1e-3, 0.25 * spacing);
    hi = std::min(hi, 0.5 * spacing);
    const auto it = std::lower_bound(knots.begin(), knots.end(), t);
    const double keps = 1e-6 * std::max(1.0, t);
    for (auto j = it; j != knots.end(); ++j)
      if (*j > t + keps) {
        hi = std::min(hi, 0.5 * (*j - t));
        break;
      }
    for (auto j = it; j != knots.begin();)
      if (*--j < t - keps) {
        hi = std::min(hi, 0.5 * (t - *j));
        break;
      }
    hi = std::max(hi, 1e-9);
    w.h[i] = hi;

    const bool has_left = t - hi >= main_time - 1e-15;
    const bool has_right = t + hi <= t_end * (1 + 1e-14);
    if (has_left && t - hi > main_time) {
      main->advance(sw.targets(t - hi));
      main_time = t - hi;
    }
    for (std::size_t k = 0; k < m; ++k) {
      auto o = main->clone();
      double lm = 0.0;
      if (has_left) {
        auto tg = sw.targets(t);
        tg[k] = sw.clamp(k, t - hi);
        o->advance(tg);
        lm = o->lmr();
      }
      o->advance(sw.targets(t));
      const double l0 = o->lmr();
      const double lp = has_right ? o->probe(k, sw.clamp(k, t + hi)) : 0.0;
      w.lmr[i] = l0;
      const double left = has_left ? (l0 - lm) / hi : std::numeric_limits<double>::quiet_NaN();
      const double right = has_right ? (lp - l0) / hi : std::numeric_limits<double>::quiet_NaN();
      w.left[k][i] = left;
      w.right[k][i] = right;
      if (has_left && has_right) {
        w.lambda[k][i] = (lp - lm) / (2.0 * hi);
        w.gap[k][i] = std::abs(right - left);
      } else {
        w.lambda[k][i] = has_left ? left : right;
        w.gap[k][i] = 0.0;
      }
      w.sum_lambda[i] += w.lambda[k][i];
    }
  }
  return w;
}

}  // namespace

WeightEstimate weights(const HullConfig& config, std::span<const double> grid, double h,
                       const CapacityOptions& opts) {
  return weights_sweep(make_sweep(config, opts), grid, h);
}

WeightEstimate weights(std::shared_ptr<const HullGeometry> geometry, const LmrOracle& proto,
                       std::span<const double> grid, double h) {
  Sweep sw;
  sw.geometry = std::move(geometry);
  sw.proto = proto.clone();
  return weights_sweep(sw, grid, h);
}

double ratio_diagnostic(const HullConfig& config, int k, double t_minus, double t_plus, double tau_minus,
                        double tau_plus, const CapacityOptions& opts) {
  check_slit(config, k);
  if (!(t_plus > t_minus)) throw Error(ErrorCode::DegenerateWindow, "need t+ > t-", k);
  if (!(tau_plus >= tau_minus)) throw Error(ErrorCode::DegenerateWindow, "need tau+ >= tau-", k);
  const Sweep sw = make_sweep(config, opts);
  const std::size_t kk = std::size_t(k);
  const double num = lmr_f_geo(sw, kk, t_minus, tau_minus) - lmr_f_geo(sw, kk, t_plus, tau_minus);
  if (tau_minus == tau_plus) {
    if (num == 0.0) throw Error(ErrorCode::DegenerateWindow, "zero lmr difference", k);
    return 1.0;
  }
  const double den = lmr_f_geo(sw, kk, t_minus, tau_plus) - lmr_f_geo(sw, kk, t_plus, tau_plus);
  if (!(std::abs(den) > 1e-14)) throw Error(ErrorCode::DegenerateWindow, "zero denominator", k, -1, den);
  return num / den;
}

ReparamResult reparametrize_capacity(const HullConfig& config, const CapacityOptions& opts,
                                     std::span<const double> targets) {
  Sweep sw = make_sweep(config, opts);
  const std::size_t m = sw.geometry->slit_count();

  std::vector<double> times{0.0};
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& s : sw.geometry->knots(k)) times.push_back(s.t);
  times.push_back(config.horizon);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  // every slit gets a knot at every sweep time so hulls agree at all relabeled times
  std::vector<std::vector<CurveSample>> augmented(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& kn = sw.geometry->knots(k);
    SlitCurve refined;
    refined.samples = kn;
    for (double t : times) {
      if (t < kn.front().t || t > kn.back().t) continue;
      augmented[k].push_back({t, sample_curve(refined, t)});
    }
  }
  sw.geometry = std::make_shared<const HullGeometry>(HullGeometry::from_knots(augmented));
  sw.proto = make_lmr_oracle(sw.geometry, config.initial_domain, opts);

  std::vector<double> sorted_targets(targets.begin(), targets.end());
  std::sort(sorted_targets.begin(), sorted_targets.end());
  std::size_t next_target = 0;

  struct Insert {
    double t_old;
    double t_new;
  };
  std::vector<Insert> inserts;

  std::vector<double> lmr_at(times.size(), 0.0);
  auto o = sw.proto->clone();
  o->advance(sw.targets(0.0));
  lmr_at[0] = o->lmr();
  for (std::size_t j = 1; j < times.size(); ++j) {
    auto ahead = o->clone();
    ahead->advance(sw.targets(times[j]));
    lmr_at[j] = ahead->lmr();
    if (!(lmr_at[j] > lmr_at[j - 1])) {
      throw Error(ErrorCode::NoConvergence, "lmr(g_t) not strictly increasing", -1, int(j), times[j]);
    }
    while (next_target < sorted_targets.size() && sorted_targets[next_target] <= lmr_at[j]) {
      const double target = sorted_targets[next_target++];
      if (target <= lmr_at[j - 1] + 1e-14 || target >= lmr_at[j] - 1e-14) continue;
      // Illinois false position on the monotone lmr(g_t)
      double a = times[j - 1], b = times[j];
      double fa = lmr_at[j - 1] - target, fb = lmr_at[j] - target;
      int side = 0;
      double root = a;
      bool ok = false;
      for (int it = 0; it < 200; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        auto probe = o->clone();
        probe->advance(sw.targets(c));
        const double fc = probe->lmr() - target;
        root = c;
        if (std::abs(fc) < 1e-13 || b - a < 1e-15 * std::max(1.0, b)) {
          ok = true;
          break;
        }
        if ((fc > 0) == (fb > 0)) {
          b = c;
          fb = fc;
          if (side == -1) fa *= 0.5;
          side = -1;
        } else {
          a = c;
          fa = fc;
          if (side == 1) fb *= 0.5;
          side = 1;
        }
      }
      if (!ok) throw Error(ErrorCode::NoConvergence, "capacity root bracketing did not converge", -1, -1, target);
      inserts.push_back({root, target});
    }
    o = std::move(ahead);
  }

  auto relabel = [&](double t) {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    return lmr_at[std::size_t(it - times.begin())];
  };

  ReparamResult res;
  res.config = config;
  res.config.horizon = relabel(config.horizon);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& kn = sw.geometry->knots(k);
    SlitCurve refined;
    refined.slit_index = config.curves[k].slit_index;
    refined.samples = kn;
    std::vector<CurveSample> out;
    for (const auto& s : kn) out.push_back({relabel(s.t), s.z});
    for (const auto& ins : inserts) {
      if (ins.t_old <= kn.front().t || ins.t_old >= kn.back().t) continue;
      out.push_back({ins.t_new, sample_curve(refined, ins.t_old)});
      ++res.inserted;
    }
    std::sort(out.begin(), out.end(), [](const CurveSample& a, const CurveSample& b) { return a.t < b.t; });
    res.config.curves[k].samples = std::move(out);
  }

  // residual check on the relabeled knots
  CapacityOptions check = opts;
  Sweep sw2 = make_sweep(res.config, check);
  std::vector<double> new_times;
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& s : res.config.curves[k].samples) new_times.push_back(s.t);
  std::sort(new_times.begin(), new_times.end());
  new_times.erase(std::unique(new_times.begin(), new_times.end()), new_times.end());
  auto v = sw2.proto->clone();
  for (double t : new_times) {
    v->advance(sw2.targets(t));
    res.max_knot_error = std::max(res.max_knot_error, std::abs(v->lmr() - t));
  }
  return res;
}

}  // namespace kloewner
