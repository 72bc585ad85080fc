#include "kloewner/error.hpp"
#include "kloewner/types.hpp"

#include <algorithm>
#include <cmath>

namespace kloewner {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BaseNotOnCircle: return "BaseNotOnCircle";
    case ErrorCode::SelfIntersection: return "SelfIntersection";
    case ErrorCode::CurvesIntersect: return "CurvesIntersect";
    case ErrorCode::OriginHit: return "OriginHit";
    case ErrorCode::NonMonotoneTimes: return "NonMonotoneTimes";
    case ErrorCode::LeavesDisk: return "LeavesDisk";
    case ErrorCode::SlitsIntersect: return "SlitsIntersect";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegeneratePartition: return "DegeneratePartition";
    case ErrorCode::TruncationOutOfRange: return "TruncationOutOfRange";
    case ErrorCode::AccuracyNotReached: return "AccuracyNotReached";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::NotInImage: return "NotInImage";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::SingularApproach: return "SingularApproach";
    case ErrorCode::InvalidDriving: return "InvalidDriving";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::BaseNotOnCircle:
    case ErrorCode::SelfIntersection:
    case ErrorCode::CurvesIntersect:
    case ErrorCode::OriginHit:
    case ErrorCode::NonMonotoneTimes:
    case ErrorCode::LeavesDisk:
    case ErrorCode::SlitsIntersect:
    case ErrorCode::OutOfRange:
    case ErrorCode::DegeneratePartition:
    case ErrorCode::TruncationOutOfRange:
    case ErrorCode::InvalidDriving:
    case ErrorCode::InvalidInput:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what, int curve, int sample, double value)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      curve_(curve),
      sample_(sample),
      value_(value) {}

Partition Partition::uniform(double a, double b, std::size_t n_knots) {
  Partition p;
  if (n_knots == 1) {
    p.knots = {a};
    return p;
  }
  p.knots.resize(n_knots);
  for (std::size_t i = 0; i < n_knots; ++i) {
    p.knots[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n_knots - 1);
  }
  p.knots.back() = b;
  return p;
}

Partition Partition::refined() const {
  Partition p;
  if (knots.empty()) return p;
  p.knots.reserve(2 * knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    p.knots.push_back(knots[i]);
    p.knots.push_back(0.5 * (knots[i] + knots[i + 1]));
  }
  p.knots.push_back(knots.back());
  return p;
}

double partition_norm(const Partition& z) {
  if (z.knots.size() < 2) {
    throw Error(ErrorCode::DegeneratePartition, "partition needs at least two knots");
  }
  double gap = 0.0;
  for (std::size_t i = 1; i < z.knots.size(); ++i) {
    const double d = z.knots[i] - z.knots[i - 1];
    if (!(d > 0.0)) throw Error(ErrorCode::DegeneratePartition, "knots not strictly increasing", -1, int(i));
    gap = std::max(gap, d);
  }
  return gap;
}

cplx sample_curve(const SlitCurve& curve, double t) {
  const auto& s = curve.samples;
  if (s.empty()) throw Error(ErrorCode::OutOfRange, "empty curve", curve.slit_index);
  const double span = std::max(1.0, std::abs(s.back().t));
  const double eps = 1e-14 * span;
  if (t < s.front().t - eps || t > s.back().t + eps) {
    throw Error(ErrorCode::OutOfRange, "time outside curve range", curve.slit_index, -1, t);
  }
  if (t <= s.front().t) return s.front().z;
  if (t >= s.back().t) return s.back().z;
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double v, const CurveSample& c) { return v < c.t; });
  const CurveSample& b = *it;
  const CurveSample& a = *(it - 1);
  if (t == a.t) return a.z;
  const double u = (t - a.t) / (b.t - a.t);
  return a.z + u * (b.z - a.z);
}

double normalize_angle(double theta) {
  double r = std::remainder(theta, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

std::vector<double> unwrap_angles(std::span<const double> theta) {
  std::vector<double> out(theta.begin(), theta.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = out[i - 1] + std::remainder(theta[i] - out[i - 1], kTwoPi);
  }
  return out;
}

bool AnnularSector::contains(cplx z, double slack) const {
  const double r = std::abs(z);
  if (r < r0 - slack || r > 1.0 + slack) return false;
  const double mid = 0.5 * (theta1 + theta2);
  const double d = std::remainder(std::arg(z) - mid, kTwoPi);
  return std::abs(d) <= 0.5 * (theta2 - theta1) + slack;
}

std::vector<cplx> AnnularSector::sample(std::size_t n_r, std::size_t n_theta, bool include_outer) const {
  std::vector<cplx> pts;
  pts.reserve(n_r * n_theta);
  for (std::size_t i = 0; i < n_r; ++i) {
    const double u = n_r == 1 ? 0.0 : double(i) / double(n_r - 1);
    double r = r0 + (1.0 - r0) * u;
    if (!include_outer && i + 1 == n_r) continue;
    for (std::size_t j = 0; j < n_theta; ++j) {
      const double v = n_theta == 1 ? 0.5 : double(j) / double(n_theta - 1);
      pts.push_back(std::polar(r, theta1 + (theta2 - theta1) * v));
    }
  }
  return pts;
}

AnnularSector AnnularSector::around(cplx zeta, double eps) {
  const double th = std::arg(zeta);
  return AnnularSector{1.0 - eps, th - kPi * eps, th + kPi * eps};
}

HullConfig rotate(const HullConfig& config, double alpha) {
  HullConfig out = config;
  const cplx r = std::polar(1.0, alpha);
  for (auto& c : out.curves)
    for (auto& s : c.samples) s.z *= r;
  for (auto& a : out.initial_domain.slits) {
    a.alpha += alpha;
    a.beta += alpha;
  }
  return out;
}

HullConfig conjugate(const HullConfig& config) {
  HullConfig out = config;
  for (auto& c : out.curves)
    for (auto& s : c.samples) s.z = std::conj(s.z);
  for (auto& a : out.initial_domain.slits) {
    const double al = a.alpha;
    a.alpha = -a.beta;
    a.beta = -al;
  }
  return out;
}

}  // namespace kloewner
