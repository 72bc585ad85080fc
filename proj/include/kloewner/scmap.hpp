#pragma once

#include "kloewner/simd.hpp"
#include "kloewner/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace kloewner {

// One geodesic zipper stage: removes the arc from `base` (on the unit circle)
// to the point at height `height` along the hyperbolic geodesic fixed by `k`.
struct SlitStage {
  cplx base{1.0, 0.0};
  double k = 0.0;
  double height = 0.0;
  cplx q{0.0, 1.0};
  cplx rot{1.0, 0.0};
  double lmr = 0.0;
  int slit = -1;

  // Geodesic from `base` through `target`: shear k and full height h.
  static void frame(cplx base, cplx target, double& k, double& h_full);
  static SlitStage make(cplx base, double k, double height, int slit = -1);
  static SlitStage towards(cplx base, cplx target, int slit = -1);

  simd::StageCoeffs coeffs() const;
  cplx frame_coordinate(cplx z) const;
  cplx forward(cplx z) const;
  cplx inverse(cplx w) const;
  cplx derivative(cplx z) const;
  cplx tip_image() const;
  // Images of the base seen from the two sides of the removed arc.
  std::pair<cplx, cplx> base_images() const;
};

struct ConformalMapRep {
  std::vector<SlitStage> stages;
  cplx final_rotation{1.0, 0.0};
  double total_lmr = 0.0;
  // Preimage tips of the removed arcs; evaluation closer than `guard` is rejected.
  std::vector<cplx> tips;
  // Images of the hull tips (driving values), one per slit.
  std::vector<cplx> tip_images;
  double guard = 1e-6;

  bool is_identity() const { return stages.empty(); }
  cplx evaluate(cplx z) const;
  cplx evaluate_unchecked(cplx z) const;
  void evaluate_batch(std::span<double> re, std::span<double> im) const;
  cplx evaluate_inverse(cplx w) const;
  void evaluate_inverse_batch(std::span<double> re, std::span<double> im) const;
  cplx derivative(cplx z) const;
  cplx inverse_derivative(cplx w) const;
  // Composition: (*this) after `inner`.
  ConformalMapRep after(const ConformalMapRep& inner) const;
};

struct ScmapOptions {
  double tol_map = 1e-8;
  double tol_seg = 1e-4;
  int max_subdivision = 10;
  double guard = 1e-6;
  bool track_boundary = true;
};

// Refined knot sets: every segment's geodesic arc stays within tol_seg of the chord.
class HullGeometry {
 public:
  static HullGeometry build(const HullConfig& config, const ScmapOptions& opts = {});

  std::size_t slit_count() const { return knots_.size(); }
  const std::vector<CurveSample>& knots(std::size_t k) const { return knots_[k]; }
  const std::vector<std::vector<CurveSample>>& all_knots() const { return knots_; }
  double start_time(std::size_t k) const { return knots_[k].front().t; }
  double end_time(std::size_t k) const { return knots_[k].back().t; }
  std::size_t inserted() const { return inserted_; }
  double max_deviation() const { return max_deviation_; }

  static HullGeometry from_knots(std::vector<std::vector<CurveSample>> knots);

 private:
  std::vector<std::vector<CurveSample>> knots_;
  std::size_t inserted_ = 0;
  double max_deviation_ = 0.0;
};

enum class ArcTag { SlitImage, CircleArc };

struct BoundaryArc {
  ArcTag tag = ArcTag::CircleArc;
  std::vector<cplx> samples;        // ordered; left side then right side for slit images
  std::vector<double> times;        // preimage times
  std::vector<int> side;            // +1 / -1 / 0 (tip)
  double diameter() const;
};

ConformalMapRep build_hull_map(const HullConfig& config, std::span<const double> truncation,
                               const ScmapOptions& opts = {});
ConformalMapRep build_hull_map(const HullGeometry& geometry, std::span<const double> truncation,
                               const ScmapOptions& opts = {});

cplx evaluate(const ConformalMapRep& map, cplx z);
cplx evaluate_inverse(const ConformalMapRep& map, cplx w);
double lmr(const ConformalMapRep& map);
double lmr_finite_difference(const ConformalMapRep& map, double h = 1e-4);
cplx tip_image(const ConformalMapRep& map, const HullConfig& config, int k, double tol_map = 1e-8);

// SlitImage: f_{k;t−,τ}(γ_k([t−,t+])), an interior curve starting at ξ_k(t−,τ).
// CircleArc: f_{k;t+,τ}(γ_k([t−,t+])) on ∂D, both prime-end sides ordered
// through ξ_k(t+,τ). Entries of `truncation` other than k are the τ values.
BoundaryArc boundary_arc_image(const HullGeometry& geometry, int k, double t_minus, double t_plus,
                               std::span<const double> truncation, ArcTag variant,
                               const ScmapOptions& opts = {});

}  // namespace kloewner
