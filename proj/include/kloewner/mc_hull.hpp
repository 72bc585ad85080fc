#pragma once

#include "kloewner/capacity.hpp"
#include "kloewner/mckernel.hpp"

#include <memory>
#include <vector>

namespace kloewner {

// Inner boundary component of the initial domain, as points carried by the zipper.
struct HoleTemplate {
  Hole::Kind kind = Hole::Kind::Arc;
  std::vector<cplx> samples;
  cplx center;  // Jordan holes: interior point the loop is star-shaped about

  static HoleTemplate from_arc(const ArcSlit& slit, std::size_t n = 257);
  static HoleTemplate from_circle(cplx center, double radius, std::size_t n = 256);
};

// lmr(g) = lmr(zipper) + lmr(canonical map of D minus the carried hole images).
std::unique_ptr<LmrOracle> make_mc_oracle(std::shared_ptr<const HullGeometry> geometry,
                                          std::vector<HoleTemplate> holes, const LaplaceOptions& opts = {});

// ln F'(z0) of the canonical slit-disk map, skipping the image bookkeeping.
double canonical_lmr(const LaplaceDomain& domain, cplx z0, const LaplaceOptions& opts = {});

}  // namespace kloewner
