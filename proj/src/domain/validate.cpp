#include "kloewner/error.hpp"
#include "kloewner/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kloewner {
namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double point_segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double u = ((p - a) * std::conj(d)).real() / len2;
  u = std::clamp(u, 0.0, 1.0);
  return std::abs(p - (a + u * d));
}

bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double segment_distance(cplx a, cplx b, cplx c, cplx d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool angle_in_arc(double theta, const ArcSlit& arc) {
  const double d = theta - arc.alpha;
  const double w = std::fmod(std::fmod(d, kTwoPi) + kTwoPi, kTwoPi);
  return w <= arc.beta - arc.alpha;
}

double point_arc_distance(cplx p, const ArcSlit& arc) {
  if (angle_in_arc(std::arg(p), arc)) return std::abs(std::abs(p) - arc.radius);
  return std::min(std::abs(p - arc.start()), std::abs(p - arc.end()));
}

double segment_arc_distance(cplx a, cplx b, const ArcSlit& arc) {
  double best = std::min({point_arc_distance(a, arc), point_arc_distance(b, arc),
                          point_segment_distance(arc.start(), a, b),
                          point_segment_distance(arc.end(), a, b)});
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return best;
  const double u0 = std::clamp(-(a * std::conj(d)).real() / len2, 0.0, 1.0);
  best = std::min(best, point_arc_distance(a + u0 * d, arc));
  // |a + u d|^2 = r^2
  const double B = 2.0 * (a * std::conj(d)).real();
  const double C = std::norm(a) - arc.radius * arc.radius;
  const double disc = B * B - 4.0 * len2 * C;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    for (double u : {(-B - sq) / (2.0 * len2), (-B + sq) / (2.0 * len2)}) {
      if (u >= 0.0 && u <= 1.0 && angle_in_arc(std::arg(a + u * d), arc)) return 0.0;
    }
  }
  return best;
}

struct Box {
  double x0, x1, y0, y1;
};

Box segment_box(cplx a, cplx b, double pad) {
  return {std::min(a.real(), b.real()) - pad, std::max(a.real(), b.real()) + pad,
          std::min(a.imag(), b.imag()) - pad, std::max(a.imag(), b.imag()) + pad};
}

bool overlap(const Box& p, const Box& q) {
  return p.x0 <= q.x1 && q.x0 <= p.x1 && p.y0 <= q.y1 && q.y0 <= p.y1;
}

}  // namespace

void validate_circular_slit_disk(const CircularSlitDisk& domain) {
  const auto& s = domain.slits;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!(s[j].radius > 0.0 && s[j].radius < 1.0)) {
      throw Error(ErrorCode::InvalidInput, "slit radius outside (0,1)", -1, int(j));
    }
    const double w = s[j].beta - s[j].alpha;
    if (!(w > 0.0 && w < kTwoPi)) {
      throw Error(ErrorCode::InvalidInput, "slit angle interval must satisfy 0 < beta-alpha < 2pi", -1, int(j));
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (std::abs(s[i].radius - s[j].radius) > 1e-12) continue;
      if (angle_in_arc(s[j].alpha, s[i]) || angle_in_arc(s[j].beta, s[i]) ||
          angle_in_arc(s[i].alpha, s[j])) {
        throw Error(ErrorCode::SlitsIntersect, "concentric slits overlap", int(i), int(j));
      }
    }
  }
}

const HullConfig& validate_hull_config(const HullConfig& config, const ValidationOptions& opts) {
  validate_circular_slit_disk(config.initial_domain);
  const double clr = opts.clearance;
  if (!(config.horizon >= 0.0)) throw Error(ErrorCode::InvalidInput, "horizon must be nonnegative");

  for (std::size_t k = 0; k < config.curves.size(); ++k) {
    const auto& c = config.curves[k];
    const int ki = int(k);
    if (c.samples.size() < 2) throw Error(ErrorCode::InvalidInput, "curve needs at least two samples", ki);
    for (std::size_t i = 1; i < c.samples.size(); ++i) {
      if (!(c.samples[i].t > c.samples[i - 1].t)) {
        throw Error(ErrorCode::NonMonotoneTimes, "sample times must increase strictly", ki, int(i));
      }
    }
    if (std::abs(std::abs(c.samples[0].z) - 1.0) > opts.base_tol) {
      throw Error(ErrorCode::BaseNotOnCircle, "first sample must lie on the unit circle", ki, 0,
                  std::abs(c.samples[0].z));
    }
    if (c.end_time() < config.horizon * (1.0 - 1e-14) - 1e-14) {
      throw Error(ErrorCode::InvalidInput, "curve ends before the horizon", ki, int(c.samples.size() - 1));
    }
    for (std::size_t i = 1; i < c.samples.size(); ++i) {
      const double r = std::abs(c.samples[i].z);
      if (r <= clr) throw Error(ErrorCode::OriginHit, "sample at the origin", ki, int(i));
      if (!(r < 1.0)) throw Error(ErrorCode::LeavesDisk, "interior sample not inside the unit disk", ki, int(i), r);
    }
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
      if (point_segment_distance(0.0, c.samples[i].z, c.samples[i + 1].z) <= clr) {
        throw Error(ErrorCode::OriginHit, "segment passes through the origin", ki, int(i + 1));
      }
    }
    // self intersections
    const std::size_t ns = c.samples.size() - 1;
    std::vector<Box> boxes(ns);
    for (std::size_t i = 0; i < ns; ++i) boxes[i] = segment_box(c.samples[i].z, c.samples[i + 1].z, clr);
    for (std::size_t i = 0; i < ns; ++i) {
      const cplx a = c.samples[i].z, b = c.samples[i + 1].z;
      if (i + 1 < ns) {
        const cplx d = c.samples[i + 2].z;
        const double cr = cross(b - a, d - b);
        const double dt = ((b - a) * std::conj(d - b)).real();
        if (std::abs(cr) <= clr * std::abs(b - a) * std::abs(d - b) && dt < 0.0) {
          throw Error(ErrorCode::SelfIntersection, "curve folds back on itself", ki, int(i + 2));
        }
      }
      for (std::size_t j = i + 2; j < ns; ++j) {
        if (!overlap(boxes[i], boxes[j])) continue;
        if (segment_distance(a, b, c.samples[j].z, c.samples[j + 1].z) <= clr) {
          throw Error(ErrorCode::SelfIntersection, "non-adjacent segments meet", ki, int(j + 1));
        }
      }
    }
    for (std::size_t j = 0; j < config.initial_domain.slits.size(); ++j) {
      const auto& arc = config.initial_domain.slits[j];
      for (std::size_t i = 0; i < ns; ++i) {
        if (segment_arc_distance(c.samples[i].z, c.samples[i + 1].z, arc) <= clr) {
          throw Error(ErrorCode::CurvesIntersect, "curve meets slit " + std::to_string(j), ki, int(i + 1));
        }
      }
    }
  }

  for (std::size_t k = 0; k < config.curves.size(); ++k) {
    const auto& c = config.curves[k];
    for (std::size_t l = k + 1; l < config.curves.size(); ++l) {
      const auto& d = config.curves[l];
      for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
        const Box bi = segment_box(c.samples[i].z, c.samples[i + 1].z, clr);
        for (std::size_t j = 0; j + 1 < d.samples.size(); ++j) {
          if (!overlap(bi, segment_box(d.samples[j].z, d.samples[j + 1].z, clr))) continue;
          if (segment_distance(c.samples[i].z, c.samples[i + 1].z, d.samples[j].z, d.samples[j + 1].z) <= clr) {
            throw Error(ErrorCode::CurvesIntersect, "curve meets curve " + std::to_string(k), int(l), int(j + 1));
          }
        }
      }
    }
  }
  return config;
}

void validate_driving(const DrivingSpec& driving, double lambda_tol) {
  const std::size_t m = driving.theta.size();
  const std::size_t n = driving.grid.size();
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidDriving, "empty driving specification");
  if (driving.lambda.size() != m) throw Error(ErrorCode::InvalidDriving, "theta/lambda slit counts differ");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(driving.grid[i] > driving.grid[i - 1])) {
      throw Error(ErrorCode::InvalidDriving, "grid must increase strictly", -1, int(i));
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (driving.theta[k].size() != n || driving.lambda[k].size() != n) {
      throw Error(ErrorCode::InvalidDriving, "per-slit series length differs from grid", int(k));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double l = driving.lambda[k][i];
      if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorCode::InvalidDriving, "negative weight", int(k), int(i), l);
      if (!std::isfinite(driving.theta[k][i])) throw Error(ErrorCode::InvalidDriving, "non-finite angle", int(k), int(i));
      sum += l;
    }
    if (std::abs(sum - 1.0) > lambda_tol) {
      throw Error(ErrorCode::InvalidDriving, "weights do not sum to 1", -1, int(i), sum);
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = k + 1; l < m; ++l) {
        const double d = std::remainder(driving.theta[k][i] - driving.theta[l][i], kTwoPi);
        if (std::abs(d) < 1e-12) throw Error(ErrorCode::InvalidDriving, "driving angles coincide", int(l), int(i));
      }
    }
  }
}

}  // namespace kloewner
