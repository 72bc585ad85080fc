#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kloewner {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct CurveSample {
  double t = 0.0;
  cplx z;
};

struct SlitCurve {
  int slit_index = 0;
  std::vector<CurveSample> samples;

  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  cplx base() const { return samples.front().z; }
};

// Concentric arc {r e^{iθ} : θ ∈ [alpha, beta]}.
struct ArcSlit {
  double radius = 0.5;
  double alpha = 0.0;
  double beta = 1.0;

  cplx start() const { return std::polar(radius, alpha); }
  cplx end() const { return std::polar(radius, beta); }
  cplx mid() const { return std::polar(radius, 0.5 * (alpha + beta)); }
};

struct CircularSlitDisk {
  std::vector<ArcSlit> slits;

  bool is_disk() const { return slits.empty(); }
  std::size_t connectivity() const { return slits.size() + 1; }
};

struct HullConfig {
  std::vector<SlitCurve> curves;
  CircularSlitDisk initial_domain;
  double horizon = 0.0;
};

struct Partition {
  std::vector<double> knots;

  static Partition uniform(double a, double b, std::size_t n_knots);
  // Inserts midpoints of every interval.
  Partition refined() const;
};

struct DrivingSpec {
  std::vector<double> grid;
  std::vector<std::vector<double>> theta;   // [slit][grid index], unwrapped
  std::vector<std::vector<double>> lambda;  // [slit][grid index]

  std::size_t slit_count() const { return theta.size(); }
};

struct AnnularSector {
  double r0 = 0.5;
  double theta1 = 0.0;
  double theta2 = 1.0;

  bool contains(cplx z, double slack = 0.0) const;
  // Tensor grid of n_r radii in [r0, 1] and n_theta angles in [theta1, theta2].
  std::vector<cplx> sample(std::size_t n_r, std::size_t n_theta, bool include_outer = true) const;
  // A_ε(ζ) = A(1−ε, arg ζ − πε, arg ζ + πε).
  static AnnularSector around(cplx zeta, double eps);
};

struct ValidationOptions {
  double clearance = 1e-12;
  double base_tol = 1e-9;
};

// Throws kloewner::Error on the first violated invariant.
const HullConfig& validate_hull_config(const HullConfig& config, const ValidationOptions& opts = {});
void validate_circular_slit_disk(const CircularSlitDisk& domain);
void validate_driving(const DrivingSpec& driving, double lambda_tol = 1e-6);

cplx sample_curve(const SlitCurve& curve, double t);
double partition_norm(const Partition& z);

double normalize_angle(double theta);
std::vector<double> unwrap_angles(std::span<const double> theta);

// Rotation of every curve point and slit arc by e^{iα}.
HullConfig rotate(const HullConfig& config, double alpha);
HullConfig conjugate(const HullConfig& config);

}  // namespace kloewner
