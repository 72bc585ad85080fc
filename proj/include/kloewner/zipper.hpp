#pragma once

#include "kloewner/scmap.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kloewner {

struct BoundarySample {
  int slit = 0;
  double t = 0.0;
  int side = 0;
};

// Incremental zipper over a refined hull geometry. Slits only move forward in
// time; `probe_lmr` advances one slit temporarily and rolls back.
class ZipperBuilder {
 public:
  static constexpr int kNodes = 16;

  explicit ZipperBuilder(const HullGeometry& geometry, bool track_boundary = false);

  // `breaks` optionally adds one extra piece boundary per slit.
  void advance(std::span<const double> targets, std::span<const double> breaks = {});
  // lmr after advancing slit k alone to t; state is unchanged afterwards.
  double probe_lmr(std::size_t k, double t);

  double lmr() const { return lmr_; }
  double time(std::size_t k) const { return slits_[k].time; }
  cplx tip_image(std::size_t k) const { return slits_[k].tip; }
  std::size_t slit_count() const { return slits_.size(); }
  const std::vector<SlitStage>& stages() const { return stages_; }
  ConformalMapRep map(double guard = 1e-6) const;

  // Interior points carried along by every stage.
  std::size_t add_tracked(std::span<const cplx> points);
  cplx tracked(std::size_t i) const { return {tr_re_[i], tr_im_[i]}; }
  std::size_t tracked_count() const { return tr_re_.size(); }

  const std::vector<BoundarySample>& boundary_meta() const { return b_meta_; }
  cplx boundary_image(std::size_t i) const { return {b_re_[i], b_im_[i]}; }
  double boundary_residual() const;

  // Geometric refinement pass: split segments whose geodesic deviates from the chord.
  void enable_refinement(double tol_seg, int max_depth);
  std::vector<std::vector<CurveSample>> take_knots() const;
  std::size_t inserted() const { return inserted_; }
  double max_deviation() const { return max_dev_; }

 private:
  struct Slit {
    std::vector<CurveSample> knots;
    std::vector<int> depth;  // per segment
    std::vector<double> fre, fim;  // blocks of kNodes per segment
    std::size_t seg = 0;
    double time = 0.0;
    cplx tip;
    bool native = false;
    double phi_done = 0.0;
    std::array<double, kNodes + 1> phi{};
  };

  void absorb_piece(std::size_t k, double t_end);
  void init_native(std::size_t k);
  double phi_at(const Slit& s, double sfrac) const;
  void push_stage(const SlitStage& st, std::size_t k);
  void fill_block(std::size_t k, std::size_t seg);
  cplx eval_current(cplx z) const;
  cplx eval_current_inverse(cplx w) const;
  bool refine_segment(std::size_t k);

  std::vector<Slit> slits_;
  std::vector<SlitStage> stages_;
  double lmr_ = 0.0;

  std::vector<double> tr_re_, tr_im_;
  bool track_boundary_ = false;
  std::vector<BoundarySample> b_meta_;
  std::vector<double> b_re_, b_im_;

  // probe mode: only slit `probe_k_` blocks below `probe_end_` are pushed
  bool probing_ = false;
  std::size_t probe_k_ = 0;
  std::size_t probe_end_ = 0;
  std::vector<double> backup_re_, backup_im_;

  bool refine_ = false;
  double tol_seg_ = 1e-4;
  int max_depth_ = 10;
  std::size_t inserted_ = 0;
  double max_dev_ = 0.0;
};

}  // namespace kloewner
