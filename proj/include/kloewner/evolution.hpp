#pragma once

#include "kloewner/capacity.hpp"
#include "kloewner/mckernel.hpp"
#include "kloewner/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace kloewner {

// Dormand–Prince 5(4) on complex state vectors.
struct OdeOptions {
  double tol = 1e-9;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 0.05;
  long max_steps = 2'000'000;
};

struct OdeStats {
  long steps = 0;
  long rejected = 0;
};

class Rk45 {
 public:
  using Rhs = std::function<void(double t, std::span<const cplx> y, std::span<cplx> dy)>;
  // Called after every accepted step; returns true if it modified the state.
  using StepHook = std::function<bool(double t, std::vector<cplx>& y)>;
  // Called when the step size underflows; returns true if it changed something worth retrying.
  using StallHook = std::function<bool(double t, std::vector<cplx>& y, std::span<const double> err)>;

  Rk45(Rhs rhs, const OdeOptions& opts);

  // Integrates from t0 to t1 (either direction), never stepping across a stop.
  void integrate(double t0, double t1, std::vector<cplx>& y, std::span<const double> stops = {},
                 const StepHook& hook = {}, const StallHook& stall = {});
  const OdeStats& stats() const { return stats_; }

 private:
  Rhs rhs_;
  OdeOptions opts_;
  OdeStats stats_;
  double h_ = 0.0;
};

// (ξ+z)/(ξ−z); PoleHit within `guard` of ξ.
cplx mobius_kernel(cplx xi, cplx z, double guard = 1e-7);

class DrivingInterp {
 public:
  explicit DrivingInterp(const DrivingSpec& driving);

  std::size_t slit_count() const { return spec_.theta.size(); }
  double start() const { return spec_.grid.front(); }
  double end() const { return spec_.grid.back(); }
  const std::vector<double>& grid() const { return spec_.grid; }
  double theta(std::size_t k, double t) const;
  cplx xi(std::size_t k, double t) const { return std::polar(1.0, theta(k, t)); }
  // Renormalised to sum 1.
  std::vector<double> lambda(double t) const;

 private:
  DrivingSpec spec_;
  std::size_t locate(double t, double& f) const;
};

struct EvolutionOptions {
  OdeOptions ode;
  double guard = 1e-7;
  // Backward-flow lifts for hull tracing, extrapolated to zero.
  double lift = 1e-4;
  double lift_half = 5e-5;
  // Sample points per interior slit component of D_t.
  std::size_t boundary_samples = 64;
  LaplaceOptions laplace;
  bool trace_tips = true;
  int threads = 1;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<std::vector<cplx>> points;        // [time][marked point]
  std::vector<CircularSlitDisk> domains;        // D_t
  std::vector<double> lmr;
  std::vector<std::vector<cplx>> xi;            // [time][slit]
  std::vector<std::vector<double>> lambda;      // [time][slit]
  std::vector<std::vector<cplx>> tips;          // [slit][time]
  std::vector<double> arc_fit_residual;         // [time]
  std::vector<bool> swallowed;                  // [marked point]
  std::vector<double> swallow_time;             // NaN when never swallowed
  bool truncated = false;
  OdeStats stats;
};

EvolutionTrace solve_forward(const CircularSlitDisk& domain0, const DrivingSpec& driving, std::span<const cplx> marked,
                             double T, const EvolutionOptions& opts = {});

// Tips γ_k(t) at each output time (driving grid points up to T, plus T unless given).
std::vector<SlitCurve> trace_hull(const CircularSlitDisk& domain0, const DrivingSpec& driving, double T,
                                  const EvolutionOptions& opts = {}, std::span<const double> times = {});

// Driving data of a capacity-parametrized config at grid times (ξ from tip images, λ from weights).
DrivingSpec extract_driving(const HullConfig& config, std::span<const double> grid, const CapacityOptions& opts = {});

struct RoundtripReport {
  DrivingSpec driving;
  std::vector<SlitCurve> traced;
  std::vector<double> hausdorff;  // per slit
  double xi_mismatch = 0.0;       // sup over grid and slits of |ξ' − ξ|
  double lambda_mismatch = 0.0;
  double driving_mismatch = 0.0;  // max of the two
};

RoundtripReport roundtrip_residual(const HullConfig& config, std::size_t n_grid = 33, const EvolutionOptions& eopts = {},
                                   const CapacityOptions& copts = {});

// Symmetric Hausdorff distance between two polylines.
double hausdorff_distance(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace kloewner
