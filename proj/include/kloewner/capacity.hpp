#pragma once

#include "kloewner/scmap.hpp"
#include "kloewner/types.hpp"

#include <memory>
#include <span>
#include <vector>

namespace kloewner {

struct LaplaceOptions;

struct CapacityOptions {
  ScmapOptions scmap;
  double tol = 1e-6;
  int max_depth = 14;
  int min_depth = 2;
  // Richardson columns used on the dyadic levels (0 disables extrapolation).
  int richardson = 2;
  // Laplace tolerance for multiply connected initial domains.
  double tol_lap = 1e-6;
};

// Incremental evaluator of lmr(f_{k;t,τ}) along monotone sweeps.
class LmrOracle {
 public:
  virtual ~LmrOracle() = default;
  virtual void advance(std::span<const double> targets, std::span<const double> breaks = {}) = 0;
  virtual double lmr() = 0;
  // lmr with slit k alone moved to t; state unchanged.
  virtual double probe(std::size_t k, double t) = 0;
  virtual std::unique_ptr<LmrOracle> clone() const = 0;
  virtual std::size_t slit_count() const = 0;
};

std::unique_ptr<LmrOracle> make_lmr_oracle(const HullConfig& config, const CapacityOptions& opts = {});
std::unique_ptr<LmrOracle> make_lmr_oracle(std::shared_ptr<const HullGeometry> geometry,
                                           const CircularSlitDisk& domain, const CapacityOptions& opts = {});
// Multiply connected variant, defined with the Laplace machinery.
std::unique_ptr<LmrOracle> make_mc_lmr_oracle(std::shared_ptr<const HullGeometry> geometry,
                                              const CircularSlitDisk& domain, const CapacityOptions& opts);

// lmr(f_{k;t,τ}) with slit k at t and all others at τ.
double lmr_f(const HullConfig& config, int k, double t, double tau, const CapacityOptions& opts = {});

double partition_sum(const HullConfig& config, int k, double t_minus, double t_plus, const Partition& z,
                     const CapacityOptions& opts = {});

struct CapacityProfile {
  std::vector<double> grid;
  std::vector<std::vector<double>> c;       // [k][grid]
  std::vector<std::vector<double>> lambda;  // [k][grid], central differences of c
  std::vector<double> lmr;                  // lmr(g_t) on the grid
  std::vector<double> cauchy_gap;           // per grid point, max over k
  std::vector<std::vector<double>> raw_levels;  // per level, Σ over grid/slits flattened (diagnostic)
  double final_norm = 0.0;
  int depth = 0;
  bool monotone = true;
};

CapacityProfile capacity_profile(const HullConfig& config, std::span<const double> grid,
                                 const CapacityOptions& opts = {});

struct WeightEstimate {
  std::vector<double> grid;
  std::vector<double> h;
  std::vector<std::vector<double>> lambda;  // central quotients
  std::vector<std::vector<double>> left;    // one-sided quotients
  std::vector<std::vector<double>> right;
  std::vector<std::vector<double>> gap;
  std::vector<double> sum_lambda;
  std::vector<double> lmr;
};

// h ≤ 0 selects min(1e-3, spacing/4); h is further capped at half the distance
// from t to the nearest other knot of any slit.
WeightEstimate weights(const HullConfig& config, std::span<const double> grid, double h = 0.0,
                       const CapacityOptions& opts = {});

// Same estimate over an explicit geometry and lmr oracle.
WeightEstimate weights(std::shared_ptr<const HullGeometry> geometry, const LmrOracle& proto,
                       std::span<const double> grid, double h = 0.0);

double ratio_diagnostic(const HullConfig& config, int k, double t_minus, double t_plus, double tau_minus,
                        double tau_plus, const CapacityOptions& opts = {});

struct ReparamResult {
  HullConfig config;
  double max_knot_error = 0.0;
  std::size_t inserted = 0;
};

// Relabels knot times by lmr(g_t); optional targets insert knots where lmr(g_t) = target.
ReparamResult reparametrize_capacity(const HullConfig& config, const CapacityOptions& opts = {},
                                     std::span<const double> targets = {});

}  // namespace kloewner
