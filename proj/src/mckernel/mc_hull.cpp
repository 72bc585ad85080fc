#include "kloewner/mc_hull.hpp"

#include "kloewner/error.hpp"
#include "kloewner/zipper.hpp"

#include <cmath>

namespace kloewner {

HoleTemplate HoleTemplate::from_arc(const ArcSlit& slit, std::size_t n) {
  HoleTemplate h;
  h.kind = Hole::Kind::Arc;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 0.5 * (1.0 - std::cos(kPi * double(i) / double(n - 1)));
    h.samples.push_back(std::polar(slit.radius, slit.alpha + u * (slit.beta - slit.alpha)));
  }
  h.center = slit.mid();
  return h;
}

HoleTemplate HoleTemplate::from_circle(cplx center, double radius, std::size_t n) {
  HoleTemplate h;
  h.kind = Hole::Kind::Jordan;
  for (std::size_t i = 0; i < n; ++i) h.samples.push_back(center + std::polar(radius, kTwoPi * double(i) / double(n)));
  h.center = center;
  return h;
}

namespace {

class McOracle final : public LmrOracle {
 public:
  McOracle(std::shared_ptr<const HullGeometry> geometry, std::vector<HoleTemplate> holes, const LaplaceOptions& opts)
      : geometry_(std::move(geometry)), holes_(std::move(holes)), opts_(opts), builder_(*geometry_, false) {
    for (const auto& h : holes_) {
      offsets_.push_back(builder_.tracked_count());
      builder_.add_tracked(h.samples);
      if (h.kind == Hole::Kind::Jordan) {
        const cplx c[1] = {h.center};
        builder_.add_tracked(c);
      }
    }
  }

  void advance(std::span<const double> targets, std::span<const double> breaks) override {
    builder_.advance(targets, breaks);
    cached_ = false;
  }

  double lmr() override {
    if (!cached_) {
      value_ = builder_.lmr() + canonical_lmr(image(builder_), 0.0, opts_);
      cached_ = true;
    }
    return value_;
  }

  double probe(std::size_t k, double t) override {
    ZipperBuilder b = builder_;
    std::vector<double> tg(b.slit_count());
    for (std::size_t j = 0; j < tg.size(); ++j) tg[j] = b.time(j);
    tg[k] = t;
    b.advance(tg);
    return b.lmr() + canonical_lmr(image(b), 0.0, opts_);
  }

  std::unique_ptr<LmrOracle> clone() const override { return std::make_unique<McOracle>(*this); }
  std::size_t slit_count() const override { return builder_.slit_count(); }

 private:
  LaplaceDomain image(const ZipperBuilder& b) const {
    LaplaceDomain d;
    for (std::size_t j = 0; j < holes_.size(); ++j) {
      const auto& h = holes_[j];
      std::vector<cplx> pts(h.samples.size());
      for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = b.tracked(offsets_[j] + i);
      if (h.kind == Hole::Kind::Arc) {
        d.holes.push_back(Hole::arc(std::move(pts)));
      } else {
        d.holes.push_back(Hole::jordan(std::move(pts), b.tracked(offsets_[j] + h.samples.size())));
      }
    }
    return d;
  }

  std::shared_ptr<const HullGeometry> geometry_;
  std::vector<HoleTemplate> holes_;
  LaplaceOptions opts_;
  ZipperBuilder builder_;
  std::vector<std::size_t> offsets_;
  bool cached_ = false;
  double value_ = 0.0;
};

}  // namespace

std::unique_ptr<LmrOracle> make_mc_oracle(std::shared_ptr<const HullGeometry> geometry,
                                          std::vector<HoleTemplate> holes, const LaplaceOptions& opts) {
  return std::make_unique<McOracle>(std::move(geometry), std::move(holes), opts);
}

std::unique_ptr<LmrOracle> make_mc_lmr_oracle(std::shared_ptr<const HullGeometry> geometry,
                                              const CircularSlitDisk& domain, const CapacityOptions& opts) {
  std::vector<HoleTemplate> holes;
  for (const auto& s : domain.slits) holes.push_back(HoleTemplate::from_arc(s));
  LaplaceOptions lo;
  lo.tol_lap = opts.tol_lap;
  return make_mc_oracle(std::move(geometry), std::move(holes), lo);
}

}  // namespace kloewner
