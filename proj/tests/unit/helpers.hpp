#pragma once

#include "kloewner/types.hpp"

#include <cmath>
#include <vector>

namespace testutil {

using kloewner::cplx;

inline double radial_capacity(double r) { return std::log((1.0 + r) * (1.0 + r) / (4.0 * r)); }

// Radial slit from e^{iθ} to r_end e^{iθ}, knots uniform in radius, times = capacity.
inline kloewner::SlitCurve radial_curve(double theta, double r_end, int n, int index = 0) {
  kloewner::SlitCurve c;
  c.slit_index = index;
  for (int i = 0; i < n; ++i) {
    const double r = 1.0 - (1.0 - r_end) * double(i) / double(n - 1);
    c.samples.push_back({i == 0 ? 0.0 : radial_capacity(r), std::polar(r, theta)});
  }
  return c;
}

inline kloewner::HullConfig single_radial(double r_end = 1.0 / 3.0, int n = 9) {
  kloewner::HullConfig cfg;
  cfg.curves.push_back(radial_curve(0.0, r_end, n));
  cfg.horizon = cfg.curves[0].end_time();
  return cfg;
}

// Smooth curve z(s) = (1 - s) e^{i(θ0 + bend s^2)}, s ∈ [0, len], times linear in s.
inline kloewner::SlitCurve bent_curve(double theta0, double bend, double len, int n, double t_end,
                                      int index = 0) {
  kloewner::SlitCurve c;
  c.slit_index = index;
  for (int i = 0; i < n; ++i) {
    const double u = double(i) / double(n - 1);
    const double s = len * u;
    c.samples.push_back({t_end * u, (1.0 - s) * std::polar(1.0, theta0 + bend * s * s)});
  }
  return c;
}

inline kloewner::HullConfig symmetric_pair(double theta, double bend, double len, int n, double t_end) {
  kloewner::HullConfig cfg;
  cfg.curves.push_back(bent_curve(theta, bend, len, n, t_end, 0));
  cfg.curves.push_back(bent_curve(-theta, -bend, len, n, t_end, 1));
  cfg.horizon = t_end;
  return cfg;
}

}  // namespace testutil
