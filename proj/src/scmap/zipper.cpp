#include "kloewner/zipper.hpp"

#include "kloewner/error.hpp"

#include <algorithm>
#include <cmath>

namespace kloewner {
namespace {

constexpr int Q = ZipperBuilder::kNodes;
const cplx I{0.0, 1.0};

const std::array<double, Q + 1>& lobatto_nodes() {
  static const std::array<double, Q + 1> u = [] {
    std::array<double, Q + 1> a{};
    for (int i = 0; i <= Q; ++i) a[i] = 0.5 * (1.0 - std::cos(kPi * i / Q));
    a[0] = 0.0;
    a[Q] = 1.0;
    return a;
  }();
  return u;
}

double time_eps(double t) { return 1e-13 * std::max(1.0, std::abs(t)); }

cplx from_frame(cplx base, double k, cplx l) {
  return base * (I - l * cplx(1.0, -k)) / (I + l * cplx(1.0, k));
}

}  // namespace

ZipperBuilder::ZipperBuilder(const HullGeometry& geometry, bool track_boundary)
    : track_boundary_(track_boundary) {
  slits_.resize(geometry.slit_count());
  for (std::size_t k = 0; k < slits_.size(); ++k) {
    Slit& s = slits_[k];
    s.knots = geometry.knots(k);
    const std::size_t nseg = s.knots.size() - 1;
    s.depth.assign(nseg, 0);
    s.fre.resize(nseg * Q);
    s.fim.resize(nseg * Q);
    s.time = s.knots.front().t;
    s.tip = s.knots.front().z / std::abs(s.knots.front().z);
    for (std::size_t j = 0; j < nseg; ++j) fill_block(k, j);
  }
}

void ZipperBuilder::enable_refinement(double tol_seg, int max_depth) {
  refine_ = true;
  tol_seg_ = tol_seg;
  max_depth_ = max_depth;
}

std::vector<std::vector<CurveSample>> ZipperBuilder::take_knots() const {
  std::vector<std::vector<CurveSample>> out;
  out.reserve(slits_.size());
  for (const auto& s : slits_) out.push_back(s.knots);
  return out;
}

cplx ZipperBuilder::eval_current(cplx z) const {
  for (const auto& st : stages_) z = st.forward(z);
  return z;
}

cplx ZipperBuilder::eval_current_inverse(cplx w) const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) w = it->inverse(w);
  return w;
}

void ZipperBuilder::fill_block(std::size_t k, std::size_t seg) {
  Slit& s = slits_[k];
  const auto& u = lobatto_nodes();
  const cplx a = s.knots[seg].z, b = s.knots[seg + 1].z;
  for (int i = 1; i < Q; ++i) {
    const cplx p = a + (u[i] * u[i]) * (b - a);
    const cplx w = eval_current(p);
    s.fre[seg * Q + i - 1] = w.real();
    s.fim[seg * Q + i - 1] = w.imag();
  }
  const cplx w = eval_current(b);
  s.fre[seg * Q + Q - 1] = w.real();
  s.fim[seg * Q + Q - 1] = w.imag();
}

std::size_t ZipperBuilder::add_tracked(std::span<const cplx> points) {
  const std::size_t first = tr_re_.size();
  for (cplx p : points) {
    const cplx w = eval_current(p);
    tr_re_.push_back(w.real());
    tr_im_.push_back(w.imag());
  }
  return first;
}

double ZipperBuilder::boundary_residual() const {
  double r = 0.0;
  for (std::size_t i = 0; i < b_re_.size(); ++i) r = std::max(r, std::abs(std::hypot(b_re_[i], b_im_[i]) - 1.0));
  for (const auto& s : slits_) r = std::max(r, std::abs(std::abs(s.tip) - 1.0));
  return r;
}

void ZipperBuilder::init_native(std::size_t k) {
  Slit& s = slits_[k];
  const std::size_t off = s.seg * Q;
  const cplx c{s.fre[off + Q - 1], s.fim[off + Q - 1]};
  double kk = 0.0, h = 0.0;
  SlitStage::frame(s.tip, c, kk, h);
  SlitStage probe;
  probe.base = s.tip;
  probe.k = kk;
  s.phi[0] = 0.0;
  s.phi[Q] = 1.0;
  for (int i = 1; i < Q; ++i) {
    const cplx l = probe.frame_coordinate({s.fre[off + i - 1], s.fim[off + i - 1]});
    s.phi[i] = std::clamp(std::norm(l) / (h * h), 0.0, 1.0);
  }
  s.native = true;
  s.phi_done = 0.0;
}

double ZipperBuilder::phi_at(const Slit& s, double sfrac) const {
  const auto& u = lobatto_nodes();
  const double x = std::sqrt(std::clamp(sfrac, 0.0, 1.0));
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= Q; ++i) {
    const double d = x - u[i];
    if (d == 0.0) return s.phi[i];
    double w = (i % 2 == 0) ? 1.0 : -1.0;
    if (i == 0 || i == Q) w *= 0.5;
    w /= d;
    num += w * s.phi[i];
    den += w;
  }
  return num / den;
}

bool ZipperBuilder::refine_segment(std::size_t k) {
  Slit& s = slits_[k];
  const std::size_t seg = s.seg;
  const std::size_t off = seg * Q;
  const cplx c{s.fre[off + Q - 1], s.fim[off + Q - 1]};
  double kk = 0.0, h = 0.0;
  SlitStage::frame(s.tip, c, kk, h);
  SlitStage fr;
  fr.base = s.tip;
  fr.k = kk;
  const auto& u = lobatto_nodes();
  const cplx a = s.knots[seg].z, b = s.knots[seg + 1].z;
  double dev = 0.0;
  for (int i : {Q / 4, Q / 2, (3 * Q) / 4}) {
    const cplx w{s.fre[off + i - 1], s.fim[off + i - 1]};
    const cplx l = fr.frame_coordinate(w);
    const cplx arc = from_frame(s.tip, kk, cplx(0.0, std::abs(l)));
    const cplx pre = eval_current_inverse(arc);
    dev = std::max(dev, std::abs(pre - (a + (u[i] * u[i]) * (b - a))));
  }
  if (dev <= tol_seg_ || s.depth[seg] >= max_depth_) {
    max_dev_ = std::max(max_dev_, dev);
    return false;
  }
  const CurveSample mid{0.5 * (s.knots[seg].t + s.knots[seg + 1].t), 0.5 * (a + b)};
  const int d = s.depth[seg] + 1;
  s.knots.insert(s.knots.begin() + seg + 1, mid);
  s.depth[seg] = d;
  s.depth.insert(s.depth.begin() + seg + 1, d);
  s.fre.insert(s.fre.begin() + (seg + 1) * Q, Q, 0.0);
  s.fim.insert(s.fim.begin() + (seg + 1) * Q, Q, 0.0);
  fill_block(k, seg);
  fill_block(k, seg + 1);
  ++inserted_;
  return true;
}

void ZipperBuilder::push_stage(const SlitStage& st, std::size_t k) {
  const simd::StageCoeffs c = st.coeffs();
  auto push_slit = [&](Slit& s, std::size_t end_block) {
    const std::size_t nseg = s.knots.size() - 1;
    if (s.seg >= nseg) return;
    std::size_t from = s.seg * Q;
    if (s.native) {
      const std::size_t e = from + Q - 1;
      simd::stage_forward(c, &s.fre[e], &s.fim[e], 1);
      from += Q;
    }
    const std::size_t to = std::min(end_block, nseg) * Q;
    if (to > from) simd::stage_forward(c, s.fre.data() + from, s.fim.data() + from, to - from);
  };
  if (probing_) {
    push_slit(slits_[probe_k_], probe_end_);
    return;
  }
  for (std::size_t j = 0; j < slits_.size(); ++j) {
    Slit& s = slits_[j];
    push_slit(s, s.knots.size());
    if (j != k) {
      double re = s.tip.real(), im = s.tip.imag();
      simd::stage_forward(c, &re, &im, 1);
      s.tip = {re, im};
    }
  }
  if (!tr_re_.empty()) simd::stage_forward(c, tr_re_.data(), tr_im_.data(), tr_re_.size());
  if (!b_re_.empty()) simd::stage_forward(c, b_re_.data(), b_im_.data(), b_re_.size());
}

void ZipperBuilder::absorb_piece(std::size_t k, double t_end) {
  Slit& s = slits_[k];
  while (s.time < t_end && s.seg + 1 < s.knots.size()) {
    if (!s.native) {
      if (refine_) {
        while (refine_segment(k)) {
        }
      }
      init_native(k);
    }
    const std::size_t seg = s.seg;
    const double ta = s.knots[seg].t, tb = s.knots[seg + 1].t;
    const bool full = t_end >= tb - time_eps(tb);
    const double te = full ? tb : t_end;
    double phi_end = full ? 1.0 : std::min(phi_at(s, (te - ta) / (tb - ta)), 1.0 - 1e-12);
    phi_end = std::max(phi_end, s.phi_done);

    const std::size_t off = seg * Q;
    const cplx c{s.fre[off + Q - 1], s.fim[off + Q - 1]};
    double kk = 0.0, h = 0.0;
    SlitStage::frame(s.tip, c, kk, h);
    const double y = full ? h : h * std::sqrt((phi_end - s.phi_done) / (1.0 - s.phi_done));
    if (y > 0.0) {
      const SlitStage st = SlitStage::make(s.tip, kk, y, int(k));
      if (track_boundary_ && !probing_) {
        const auto [lp, lm] = st.base_images();
        b_meta_.push_back({int(k), s.time, +1});
        b_re_.push_back(lp.real());
        b_im_.push_back(lp.imag());
        b_meta_.push_back({int(k), s.time, -1});
        b_re_.push_back(lm.real());
        b_im_.push_back(lm.imag());
      }
      push_stage(st, k);
      s.tip = st.tip_image();
      stages_.push_back(st);
      lmr_ += st.lmr;
    }
    if (full) {
      ++s.seg;
      s.native = false;
      s.phi_done = 0.0;
      s.time = tb;
    } else {
      s.phi_done = phi_end;
      s.time = te;
    }
  }
}

void ZipperBuilder::advance(std::span<const double> targets, std::span<const double> breaks) {
  if (targets.size() != slits_.size()) {
    throw Error(ErrorCode::InvalidInput, "truncation vector size differs from slit count");
  }
  struct Piece {
    double t;
    std::size_t k;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < slits_.size(); ++k) {
    const Slit& s = slits_[k];
    double t = targets[k];
    const double end = s.knots.back().t;
    if (t > end + time_eps(end)) {
      throw Error(ErrorCode::TruncationOutOfRange, "truncation beyond curve horizon", int(k), -1, t);
    }
    if (t < s.time - time_eps(s.time)) {
      if (t < s.knots.front().t - time_eps(s.knots.front().t) && s.time == s.knots.front().t) continue;
      throw Error(ErrorCode::TruncationOutOfRange, "builder cannot move a slit backwards", int(k), -1, t);
    }
    t = std::min(t, end);
    for (std::size_t j = s.seg + 1; j < s.knots.size() && s.knots[j].t < t; ++j) {
      if (s.knots[j].t > s.time) pieces.push_back({s.knots[j].t, k});
    }
    if (t > s.time) pieces.push_back({t, k});
    if (k < breaks.size() && breaks[k] > s.time && breaks[k] < t) pieces.push_back({breaks[k], k});
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return a.t < b.t || (a.t == b.t && a.k < b.k);
  });
  for (std::size_t i = 0; i < pieces.size();) {
    std::size_t j = i;
    while (j < pieces.size() && pieces[j].t == pieces[i].t) ++j;
    if (j - i > 1) {
      // symmetric splitting of simultaneous pieces: first halves ascending, second halves descending
      for (std::size_t p = i; p < j; ++p) {
        const std::size_t k = pieces[p].k;
        absorb_piece(k, 0.5 * (slits_[k].time + pieces[p].t));
      }
      for (std::size_t p = j; p-- > i;) absorb_piece(pieces[p].k, pieces[p].t);
    } else {
      absorb_piece(pieces[i].k, pieces[i].t);
    }
    i = j;
  }
}

double ZipperBuilder::probe_lmr(std::size_t k, double t) {
  Slit& s = slits_[k];
  const double end = s.knots.back().t;
  if (t > end + time_eps(end)) {
    throw Error(ErrorCode::TruncationOutOfRange, "probe beyond curve horizon", int(k), -1, t);
  }
  t = std::min(t, end);
  if (t <= s.time) return lmr_;
  std::size_t last = s.seg;
  while (last + 1 < s.knots.size() - 1 && s.knots[last + 1].t < t) ++last;
  probe_end_ = last + 1;
  const std::size_t from = s.seg * Q, to = probe_end_ * Q;
  backup_re_.assign(s.fre.begin() + from, s.fre.begin() + to);
  backup_im_.assign(s.fim.begin() + from, s.fim.begin() + to);
  const std::size_t seg = s.seg;
  const double time = s.time, phi_done = s.phi_done;
  const cplx tip = s.tip;
  const bool native = s.native;
  const auto phi = s.phi;
  const std::size_t n_stages = stages_.size();
  const double lmr0 = lmr_;

  probing_ = true;
  probe_k_ = k;
  absorb_piece(k, t);
  const double result = lmr_;
  probing_ = false;

  std::copy(backup_re_.begin(), backup_re_.end(), s.fre.begin() + from);
  std::copy(backup_im_.begin(), backup_im_.end(), s.fim.begin() + from);
  s.seg = seg;
  s.time = time;
  s.phi_done = phi_done;
  s.tip = tip;
  s.native = native;
  s.phi = phi;
  stages_.resize(n_stages);
  lmr_ = lmr0;
  return result;
}

ConformalMapRep ZipperBuilder::map(double guard) const {
  ConformalMapRep m;
  m.stages = stages_;
  m.total_lmr = lmr_;
  m.guard = guard;
  for (const auto& s : slits_) {
    m.tip_images.push_back(s.tip);
    if (s.time > s.knots.front().t) {
      SlitCurve c;
      c.samples = s.knots;
      m.tips.push_back(sample_curve(c, s.time));
    }
  }
  return m;
}

}  // namespace kloewner
