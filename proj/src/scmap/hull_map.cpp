#include "kloewner/error.hpp"
#include "kloewner/scmap.hpp"
#include "kloewner/zipper.hpp"

#include <algorithm>
#include <cmath>

namespace kloewner {

HullGeometry HullGeometry::from_knots(std::vector<std::vector<CurveSample>> knots) {
  HullGeometry g;
  g.knots_ = std::move(knots);
  return g;
}

HullGeometry HullGeometry::build(const HullConfig& config, const ScmapOptions& opts) {
  std::vector<std::vector<CurveSample>> knots;
  knots.reserve(config.curves.size());
  for (const auto& c : config.curves) knots.push_back(c.samples);
  HullGeometry raw = from_knots(knots);
  if (opts.tol_seg <= 0.0 || opts.max_subdivision <= 0) return raw;
  ZipperBuilder b(raw);
  b.enable_refinement(opts.tol_seg, opts.max_subdivision);
  std::vector<double> ends;
  for (const auto& c : config.curves) ends.push_back(c.end_time());
  b.advance(ends);
  HullGeometry g = from_knots(b.take_knots());
  g.inserted_ = b.inserted();
  g.max_deviation_ = b.max_deviation();
  return g;
}

cplx ConformalMapRep::evaluate_unchecked(cplx z) const {
  for (const auto& st : stages) z = st.forward(z);
  return final_rotation * z;
}

cplx ConformalMapRep::evaluate(cplx z) const {
  if (!(std::abs(z) <= 1.0 + 1e-12)) {
    throw Error(ErrorCode::OutsideDomain, "point outside the closed unit disk", -1, -1, std::abs(z));
  }
  for (std::size_t i = 0; i < tips.size(); ++i) {
    if (std::abs(z - tips[i]) < guard) {
      throw Error(ErrorCode::OutsideDomain, "point within guard radius of a slit tip", int(i));
    }
  }
  return evaluate_unchecked(z);
}

void ConformalMapRep::evaluate_batch(std::span<double> re, std::span<double> im) const {
  const std::size_t n = std::min(re.size(), im.size());
  for (const auto& st : stages) simd::stage_forward(st.coeffs(), re.data(), im.data(), n);
  if (final_rotation != cplx(1.0, 0.0)) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx w = final_rotation * cplx(re[i], im[i]);
      re[i] = w.real();
      im[i] = w.imag();
    }
  }
}

cplx ConformalMapRep::evaluate_inverse(cplx w) const {
  if (!(std::abs(w) < 1.0 - 1e-12)) {
    throw Error(ErrorCode::NotInImage, "inverse needs |w| < 1", -1, -1, std::abs(w));
  }
  cplx z = w / final_rotation;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) z = it->inverse(z);
  return z;
}

void ConformalMapRep::evaluate_inverse_batch(std::span<double> re, std::span<double> im) const {
  const std::size_t n = std::min(re.size(), im.size());
  if (final_rotation != cplx(1.0, 0.0)) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx w = cplx(re[i], im[i]) / final_rotation;
      re[i] = w.real();
      im[i] = w.imag();
    }
  }
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    simd::stage_inverse(it->coeffs(), re.data(), im.data(), n);
  }
}

cplx ConformalMapRep::derivative(cplx z) const {
  cplx d{1.0, 0.0};
  for (const auto& st : stages) {
    d *= st.derivative(z);
    z = st.forward(z);
  }
  return d * final_rotation;
}

cplx ConformalMapRep::inverse_derivative(cplx w) const { return 1.0 / derivative(evaluate_inverse(w)); }

ConformalMapRep ConformalMapRep::after(const ConformalMapRep& inner) const {
  ConformalMapRep out;
  out.stages = inner.stages;
  out.tips = inner.tips;
  out.guard = std::max(guard, inner.guard);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    SlitStage st = stages[i];
    if (i == 0 && inner.final_rotation != cplx(1.0, 0.0)) {
      st = SlitStage::make(st.base / inner.final_rotation, st.k, st.height, st.slit);
    }
    out.stages.push_back(st);
  }
  if (stages.empty()) {
    out.final_rotation = final_rotation * inner.final_rotation;
  } else {
    out.final_rotation = final_rotation;
  }
  out.total_lmr = total_lmr + inner.total_lmr;
  out.tip_images = tip_images;
  return out;
}

cplx evaluate(const ConformalMapRep& map, cplx z) { return map.evaluate(z); }

cplx evaluate_inverse(const ConformalMapRep& map, cplx w) { return map.evaluate_inverse(w); }

double lmr(const ConformalMapRep& map) { return map.total_lmr; }

double lmr_finite_difference(const ConformalMapRep& map, double h) {
  const cplx d = (map.evaluate_unchecked(h) - map.evaluate_unchecked(-h)) / (2.0 * h);
  return std::log(std::abs(d));
}

cplx tip_image(const ConformalMapRep& map, const HullConfig& config, int k, double tol_map) {
  if (k < 0 || std::size_t(k) >= config.curves.size() || std::size_t(k) >= map.tip_images.size()) {
    throw Error(ErrorCode::OutOfRange, "slit index out of range", k);
  }
  const cplx xi = map.tip_images[std::size_t(k)];
  if (std::abs(std::abs(xi) - 1.0) > tol_map) {
    throw Error(ErrorCode::AccuracyNotReached, "tip image off the unit circle", k, -1,
                std::abs(std::abs(xi) - 1.0));
  }
  return xi;
}

ConformalMapRep build_hull_map(const HullGeometry& geometry, std::span<const double> truncation,
                               const ScmapOptions& opts) {
  if (truncation.size() != geometry.slit_count()) {
    throw Error(ErrorCode::InvalidInput, "truncation vector size differs from slit count");
  }
  for (std::size_t k = 0; k < truncation.size(); ++k) {
    const double end = geometry.end_time(k);
    if (!(truncation[k] >= 0.0) || truncation[k] > end + 1e-13 * std::max(1.0, end)) {
      throw Error(ErrorCode::TruncationOutOfRange, "truncation outside curve range", int(k), -1, truncation[k]);
    }
  }
  ZipperBuilder b(geometry, opts.track_boundary);
  b.advance(truncation);
  const double res = b.boundary_residual();
  if (res > opts.tol_map) {
    throw Error(ErrorCode::AccuracyNotReached, "boundary samples off the unit circle", -1, -1, res);
  }
  return b.map(opts.guard);
}

ConformalMapRep build_hull_map(const HullConfig& config, std::span<const double> truncation,
                               const ScmapOptions& opts) {
  if (!config.initial_domain.is_disk()) {
    throw Error(ErrorCode::InvalidInput, "hull maps need a simply connected initial domain");
  }
  if (truncation.size() != config.curves.size()) {
    throw Error(ErrorCode::InvalidInput, "truncation vector size differs from slit count");
  }
  for (std::size_t k = 0; k < truncation.size(); ++k) {
    const double end = config.curves[k].end_time();
    if (!(truncation[k] >= 0.0) || truncation[k] > end + 1e-13 * std::max(1.0, end)) {
      throw Error(ErrorCode::TruncationOutOfRange, "truncation outside curve range", int(k), -1, truncation[k]);
    }
  }
  return build_hull_map(HullGeometry::build(config, opts), truncation, opts);
}

double BoundaryArc::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) d = std::max(d, std::abs(samples[i] - samples[j]));
  return d;
}

BoundaryArc boundary_arc_image(const HullGeometry& geometry, int k, double t_minus, double t_plus,
                               std::span<const double> truncation, ArcTag variant,
                               const ScmapOptions& opts) {
  if (k < 0 || std::size_t(k) >= geometry.slit_count()) throw Error(ErrorCode::OutOfRange, "slit index", k);
  if (!(t_minus <= t_plus)) throw Error(ErrorCode::OutOfRange, "need t- <= t+", k);
  const std::size_t kk = std::size_t(k);
  std::vector<double> first(truncation.begin(), truncation.end());
  first[kk] = t_minus;
  std::vector<double> second = first;
  second[kk] = t_plus;
  for (double t : second) {
    if (t < 0.0) throw Error(ErrorCode::TruncationOutOfRange, "negative truncation", k);
  }
  BoundaryArc arc;
  if (t_minus == t_plus) {
    ZipperBuilder b(geometry, false);
    b.advance(first);
    arc.tag = ArcTag::CircleArc;
    arc.samples = {b.tip_image(kk)};
    arc.times = {t_minus};
    arc.side = {0};
    return arc;
  }

  if (variant == ArcTag::SlitImage) {
    ZipperBuilder b(geometry, false);
    b.advance(first);
    const ConformalMapRep m = b.map(opts.guard);
    arc.tag = ArcTag::SlitImage;
    arc.samples.push_back(b.tip_image(kk));
    arc.times.push_back(t_minus);
    arc.side.push_back(0);
    SlitCurve c;
    c.samples = geometry.knots(kk);
    for (const auto& s : c.samples) {
      if (s.t <= t_minus || s.t >= t_plus) continue;
      arc.samples.push_back(m.evaluate_unchecked(s.z));
      arc.times.push_back(s.t);
      arc.side.push_back(0);
    }
    arc.samples.push_back(m.evaluate_unchecked(sample_curve(c, t_plus)));
    arc.times.push_back(t_plus);
    arc.side.push_back(0);
    return arc;
  }

  ZipperBuilder b(geometry, true);
  std::vector<double> breaks(second.size(), -1.0);
  breaks[kk] = t_minus;
  b.advance(second, breaks);
  const double res = b.boundary_residual();
  if (res > opts.tol_map) throw Error(ErrorCode::AccuracyNotReached, "boundary drift", k, -1, res);
  struct Entry {
    double t;
    cplx w;
  };
  std::vector<Entry> plus, minus;
  const auto& meta = b.boundary_meta();
  for (std::size_t i = 0; i < meta.size(); ++i) {
    if (meta[i].slit != k || meta[i].t < t_minus - 1e-14 || meta[i].t > t_plus) continue;
    (meta[i].side > 0 ? plus : minus).push_back({meta[i].t, b.boundary_image(i)});
  }
  arc.tag = ArcTag::CircleArc;
  for (const auto& e : plus) {
    arc.samples.push_back(e.w);
    arc.times.push_back(e.t);
    arc.side.push_back(+1);
  }
  arc.samples.push_back(b.tip_image(kk));
  arc.times.push_back(t_plus);
  arc.side.push_back(0);
  for (auto it = minus.rbegin(); it != minus.rend(); ++it) {
    arc.samples.push_back(it->w);
    arc.times.push_back(it->t);
    arc.side.push_back(-1);
  }
  return arc;
}

}  // namespace kloewner
