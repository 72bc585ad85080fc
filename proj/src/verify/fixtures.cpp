#include "kloewner/capacity.hpp"
#include "kloewner/error.hpp"
#include "kloewner/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace kloewner::verify {
namespace {

using io::json;

// z(s) = (1 − s) e^{i(θ0 + bend·s²)}, s ∈ [0, len], times linear in s.
SlitCurve bent_curve(double theta0, double bend, double len, int n, double t_end, int index) {
  SlitCurve c;
  c.slit_index = index;
  for (int i = 0; i < n; ++i) {
    const double u = double(i) / double(n - 1);
    const double s = len * u;
    c.samples.push_back({t_end * u, (1.0 - s) * std::polar(1.0, theta0 + bend * s * s)});
  }
  return c;
}

HullConfig capacity_config(std::vector<SlitCurve> curves) {
  HullConfig cfg;
  cfg.curves = std::move(curves);
  cfg.horizon = 1.0;
  HullConfig out = reparametrize_capacity(cfg).config;
  double end = out.horizon;
  for (const auto& c : out.curves) end = std::min(end, c.end_time());
  out.horizon = end;
  return out;
}

// Knot times of the first curve inside [lo·T, hi·T], thinned to `count`.
std::vector<double> knot_grid(const HullConfig& cfg, double lo, double hi, std::size_t count) {
  std::vector<double> t;
  for (const auto& s : cfg.curves[0].samples)
    if (s.t >= lo * cfg.horizon && s.t <= hi * cfg.horizon) t.push_back(s.t);
  if (t.size() <= count) return t;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(t[i * (t.size() - 1) / (count - 1)]);
  return out;
}

HullConfig roundtrip_config() {
  return capacity_config({bent_curve(0.3, 0.8, 0.45, 81, 1.0, 0), bent_curve(2.4, -0.6, 0.4, 81, 1.0, 1)});
}

HullConfig symmetric_config(double bend2) {
  return capacity_config({bent_curve(0.9, 0.7, 0.45, 61, 1.0, 0), bent_curve(-0.9, -bend2, 0.45, 61, 1.0, 1)});
}

json a1() {
  DrivingSpec d;
  d.grid = {0.0, 0.5};
  d.theta = {{0.0, 0.0}};
  d.lambda = {{1.0, 1.0}};
  return {{"driving", io::to_json(d)}, {"times", {0.1, std::log(4.0 / 3.0), 0.5}}};
}

json a2() {
  json configs = json::array(), grids = json::array();
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int m = seed % 2 ? 2 : 3;
    std::vector<SlitCurve> curves;
    const double offset = kTwoPi * u(rng);
    for (int k = 0; k < m; ++k) {
      const double theta0 = offset + kTwoPi * double(k) / double(m) + 0.3 * (u(rng) - 0.5);
      const double bend = 1.2 * (u(rng) - 0.5);
      const double len = 0.25 + 0.2 * u(rng);
      curves.push_back(bent_curve(theta0, bend, len, 61, 1.0, k));
    }
    const HullConfig cfg = capacity_config(std::move(curves));
    configs.push_back(io::to_json(cfg));
    grids.push_back(knot_grid(cfg, 0.15, 0.9, 6));
  }
  return {{"configs", configs}, {"grids", grids}};
}

json a3(double bend2) {
  const HullConfig cfg = symmetric_config(bend2);
  return {{"config", io::to_json(cfg)}, {"grid", knot_grid(cfg, 0.2, 0.9, 4)}};
}

json a5() {
  HullConfig cfg;
  cfg.curves.push_back(bent_curve(0.4, 0.9, 0.5, 30, 1.0, 0));
  cfg.horizon = 1.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  json partitions = json::array();
  for (int n : {2, 5, 17}) {
    std::vector<double> z;
    for (int i = 0; i < n; ++i) z.push_back(double(i) / double(n - 1));
    partitions.push_back(z);
  }
  std::vector<double> z{0.0, 1.0};
  for (int i = 0; i < 9; ++i) z.push_back(u(rng));
  std::sort(z.begin(), z.end());
  partitions.push_back(z);
  return {{"config", io::to_json(cfg)}, {"times", {0.25, 0.6, 1.0}}, {"partitions", partitions}};
}

json a6() {
  const HullConfig cfg = roundtrip_config();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, cfg.horizon);
  json pairs = json::array();
  while (pairs.size() < 100) {
    double t1 = u(rng), t2 = u(rng), s1 = u(rng), s2 = u(rng);
    if (t1 > t2) std::swap(t1, t2);
    if (s1 > s2) std::swap(s1, s2);
    if (t2 - t1 < 1e-3 || s2 - s1 < 1e-3) continue;
    pairs.push_back({{"slit", int(pairs.size() % 2)}, {"t", {t1, t2}}, {"tau", {s1, s2}}});
  }
  return {{"config", io::to_json(cfg)}, {"pairs", pairs}};
}

json a7() { return {{"config", io::to_json(roundtrip_config())}, {"n_grid", 33}}; }

json a8() { return {{"zetas", {io::to_json(1.0), io::to_json(std::polar(1.0, 0.7))}}, {"radius", 0.9}, {"count", 200}}; }

json a9() {
  CircularSlitDisk one, three;
  one.slits.push_back({0.5, 0.2, 1.4});
  three.slits = {{0.5, 0.2, 1.4}, {0.7, 2.5, 3.5}, {0.3, 4.0, 5.5}};
  return {{"domain", io::to_json(one)},
          {"zeta", io::to_json(std::polar(1.0, -2.0))},
          {"away", 0.1},
          {"period_domains", {io::to_json(one), io::to_json(three)}}};
}

json a10() {
  const HullConfig cfg = roundtrip_config();
  return {{"config", io::to_json(cfg)}, {"t0", 0.5 * cfg.horizon - 0.05}, {"windows", {0.1, 0.05, 0.025}}};
}

json a11() {
  const HullConfig cfg = roundtrip_config();
  const double T = cfg.horizon;
  return {{"config", io::to_json(cfg)},
          {"times", {0.25 * T, 0.5 * T, 0.75 * T}},
          {"steps", {0.01, 0.005}},
          {"eps", {0.1, 0.2}}};
}

json a12() {
  HullConfig cfg;
  cfg.curves.push_back(bent_curve(0.2, 0.6, 0.3, 121, 0.3, 0));
  cfg.curves.push_back(bent_curve(-1.0, -0.4, 0.25, 121, 0.3, 1));
  cfg.horizon = 0.3;
  return {{"config", io::to_json(cfg)},
          {"hole", {{"center", io::to_json(cplx(-0.4, 0.1))}, {"radius", 0.15}}},
          {"grid", {0.1, 0.2}}};
}

}  // namespace

std::vector<std::string> fixture_ids() {
  return {"A1", "A2", "A3", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12"};
}

json default_fixture(const std::string& id) {
  json j;
  if (id == "A1") j = a1();
  else if (id == "A2") j = a2();
  else if (id == "A3") j = a3(0.7);
  else if (id == "A5") j = a5();
  else if (id == "A6") j = a6();
  else if (id == "A7") j = a7();
  else if (id == "A8") j = a8();
  else if (id == "A9") j = a9();
  else if (id == "A10") j = a10();
  else if (id == "A11") j = a11();
  else if (id == "A12") j = a12();
  else throw Error(ErrorCode::InvalidInput, "no fixture named " + id);
  j["check"] = id;
  return j;
}

json perturbed_symmetry_fixture() {
  json j = a3(0.55);
  j["check"] = "A3";
  return j;
}

}  // namespace kloewner::verify
