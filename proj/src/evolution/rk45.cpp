#include "kloewner/error.hpp"
#include "kloewner/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace kloewner {
namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

}  // namespace

Rk45::Rk45(Rhs rhs, const OdeOptions& opts) : rhs_(std::move(rhs)), opts_(opts), h_(opts.h_init) {}

void Rk45::integrate(double t0, double t1, std::vector<cplx>& y, std::span<const double> stops, const StepHook& hook,
                     const StallHook& stall) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const std::size_t n = y.size();
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  std::vector<double> err(n);
  std::vector<double> stop_list(stops.begin(), stops.end());
  std::sort(stop_list.begin(), stop_list.end());
  if (dir < 0) std::reverse(stop_list.begin(), stop_list.end());

  double t = t0;
  bool fsal = false;
  const double teps = 1e-14 * std::max(1.0, std::abs(t1));
  while (dir * (t1 - t) > teps) {
    double target = t1;
    for (double s : stop_list)
      if (dir * (s - t) > teps && dir * (t1 - s) > 0.0) {
        target = s;
        break;
      }
    double h = std::min({h_, opts_.h_max, std::abs(target - t)});
    if (!fsal) rhs_(t, y, k1);
    bool accepted = false;
    while (!accepted) {
      if (++stats_.steps > opts_.max_steps) throw Error(ErrorCode::NoConvergence, "step limit reached", -1, -1, t);
      const double hs = dir * h;
      auto stage = [&](std::vector<cplx>& out, double ct, auto&& combine) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * combine(i);
        rhs_(t + ct * hs, tmp, out);
      };
      stage(k2, c2, [&](std::size_t i) { return a21 * k1[i]; });
      stage(k3, c3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
      stage(k4, c4, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
      stage(k5, c5, [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
      stage(k6, 1.0,
            [&](std::size_t i) { return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]; });
      for (std::size_t i = 0; i < n; ++i)
        y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      rhs_(t + hs, y5, k7);
      double e = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        err[i] = std::abs(hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]));
        if (!std::isfinite(err[i])) err[i] = std::numeric_limits<double>::infinity();
        e = std::max(e, err[i]);
      }
      const double fac = e > 0.0 ? std::clamp(0.9 * std::pow(opts_.tol / e, 0.2), 0.2, 5.0) : 5.0;
      if (e <= opts_.tol) {
        accepted = true;
        const bool hit_target = h >= std::abs(target - t) * (1.0 - 1e-15);
        t = hit_target ? target : t + hs;
        y.swap(y5);
        k1.swap(k7);
        fsal = true;
        // keep the controller's proposal when a stop clipped the step
        h_ = std::max(h_, std::min(h * fac, opts_.h_max));
        if (!hit_target) h_ = std::min(h * fac, opts_.h_max);
      } else {
        ++stats_.rejected;
        h *= fac;
        if (h < opts_.h_min) {
          if (stall && stall(t, y, err)) {
            rhs_(t, y, k1);
            h = std::min({opts_.h_init, opts_.h_max, std::abs(target - t)});
            continue;
          }
          throw Error(ErrorCode::SingularApproach, "step size underflow", -1, -1, t);
        }
      }
    }
    if (hook && hook(t, y)) fsal = false;
  }
}

}  // namespace kloewner
