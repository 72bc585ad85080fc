#include "kloewner/capacity.hpp"
#include "kloewner/error.hpp"
#include "kloewner/evolution.hpp"
#include "kloewner/io.hpp"
#include "kloewner/mckernel.hpp"
#include "kloewner/verify.hpp"

#include "CLI11.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace kloewner;
using io::json;

namespace {

struct Tolerances {
  double tol_map = 1e-8;
  double tol_ode = 1e-9;
  double tol_lap = 1e-6;
  int depth = 14;
  int threads = 1;
  bool reparam = false;

  CapacityOptions capacity() const {
    CapacityOptions o;
    o.scmap.tol_map = tol_map;
    o.max_depth = depth;
    o.tol_lap = tol_lap;
    return o;
  }
  EvolutionOptions evolution() const {
    EvolutionOptions o;
    o.ode.tol = tol_ode;
    o.laplace.tol_lap = tol_lap;
    o.threads = threads;
    return o;
  }
  LaplaceOptions laplace() const {
    LaplaceOptions o;
    o.tol_lap = tol_lap;
    return o;
  }
  json to_json() const {
    return {{"tol_map", tol_map}, {"tol_ode", tol_ode}, {"tol_lap", tol_lap},
            {"depth", depth},     {"threads", threads}, {"reparam", reparam}};
  }
};

void add_tolerances(CLI::App* cmd, Tolerances& t) {
  cmd->add_option("--tol-map", t.tol_map, "conformal map tolerance")->capture_default_str();
  cmd->add_option("--tol-ode", t.tol_ode, "ODE local error tolerance")->capture_default_str();
  cmd->add_option("--tol-lap", t.tol_lap, "Laplace fit tolerance")->capture_default_str();
  cmd->add_option("--depth", t.depth, "maximum dyadic refinement depth")->capture_default_str();
  cmd->add_option("--threads", t.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

// Output directory plus the manifest written on every exit path.
class Run {
 public:
  Run(std::string command, const Tolerances& tol) : start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.tolerances = tol.to_json();
    manifest_.versions = {{"kloewner", io::library_version()},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  }

  void set_out(const fs::path& dir) {
    fs::create_directories(dir);
    out_ = dir;
  }
  fs::path out(const std::string& name) const { return out_ / name; }
  io::RunManifest& manifest() { return manifest_; }

  json input(const fs::path& p) {
    json j = io::read_json_file(p);
    manifest_.add_input(p);
    return j;
  }

  int finish(int code, const std::string& failure_code = {}, const std::string& reason = {}) {
    manifest_.exit_code = code;
    manifest_.failure_code = failure_code;
    manifest_.failure_reason = reason;
    manifest_.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (!out_.empty()) {
      try {
        manifest_.write(out_ / "manifest.json");
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
      }
    }
    return code;
  }

 private:
  io::RunManifest manifest_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
};

cplx parse_complex(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  double re = 0.0, im = 0.0;
  if (!(in >> re)) throw Error(ErrorCode::InvalidInput, "cannot parse complex number '" + s + "'");
  if (!(in >> im)) im = 0.0;
  std::string rest;
  if (in >> rest) throw Error(ErrorCode::InvalidInput, "cannot parse complex number '" + s + "'");
  return {re, im};
}

// ---------------------------------------------------------------- forward

struct ForwardArgs {
  std::string config, driving, out, points;
  double horizon = -1.0;
};

int cmd_forward(const ForwardArgs& a, const Tolerances& tol, Run& run) {
  run.set_out(a.out);
  const json cj = run.input(a.config);
  const DrivingSpec driving = io::driving_from_json(run.input(a.driving));
  const CircularSlitDisk domain = io::slit_disk_from_json(cj.value("initial_domain", json()));
  std::vector<cplx> marked;
  if (cj.contains("marked_points")) marked = io::points_from_json(cj["marked_points"]);
  if (!a.points.empty()) {
    const auto extra = io::points_from_json(run.input(a.points));
    marked.insert(marked.end(), extra.begin(), extra.end());
  }
  double T = a.horizon;
  if (T < 0.0) T = cj.value("horizon", 0.0) > 0.0 ? cj["horizon"].get<double>() : driving.grid.back();

  const EvolutionTrace tr = solve_forward(domain, driving, marked, T, tol.evolution());

  io::CsvWriter trace(run.out("trace.csv"), {"t", "point_id", "re", "im", "lmr"});
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    for (std::size_t p = 0; p < marked.size(); ++p)
      trace.row({tr.times[i], double(p), tr.points[i][p].real(), tr.points[i][p].imag(), tr.lmr[i]});
  trace.close();

  io::CsvWriter lmr(run.out("lmr.csv"), {"t", "lmr", "arc_fit_residual"});
  for (std::size_t i = 0; i < tr.times.size(); ++i) lmr.row({tr.times[i], tr.lmr[i], tr.arc_fit_residual[i]});
  lmr.close();

  io::CsvWriter drv(run.out("driving.csv"), {"t", "slit", "xi_re", "xi_im", "lambda"});
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    for (std::size_t k = 0; k < tr.xi[i].size(); ++k)
      drv.row({tr.times[i], double(k), tr.xi[i][k].real(), tr.xi[i][k].imag(), tr.lambda[i][k]});
  drv.close();

  std::vector<fs::path> outputs{run.out("trace.csv"), run.out("lmr.csv"), run.out("driving.csv")};
  if (!domain.is_disk()) {
    io::CsvWriter dom(run.out("domains.csv"), {"t", "slit", "radius", "alpha", "beta"});
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      for (std::size_t k = 0; k < tr.domains[i].slits.size(); ++k) {
        const ArcSlit& s = tr.domains[i].slits[k];
        dom.row({tr.times[i], double(k), s.radius, s.alpha, s.beta});
      }
    dom.close();
    outputs.push_back(run.out("domains.csv"));
  }

  std::size_t swallowed = 0;
  json swallow = json::array();
  for (std::size_t p = 0; p < marked.size(); ++p) {
    if (!tr.swallowed[p]) continue;
    ++swallowed;
    swallow.push_back({{"point_id", p}, {"time", tr.swallow_time[p]}});
  }
  auto& m = run.manifest();
  for (const auto& p : outputs) m.add_output(p);
  m.summary = {{"horizon", T},
               {"points", marked.size()},
               {"steps", tr.stats.steps},
               {"rejected", tr.stats.rejected},
               {"final_lmr", tr.lmr.back()},
               {"swallowed", swallow}};
  m.tolerances["guard"] = tol.evolution().guard;
  if (tr.truncated) m.flags.push_back("truncated");
  if (swallowed) m.flags.push_back("swallowed");
  return 0;
}

// ---------------------------------------------------------------- trace-hull

struct TraceArgs {
  std::string driving, out, domain;
  double horizon = -1.0;
  int per_interval = 8;
};

int cmd_trace(const TraceArgs& a, const Tolerances& tol, Run& run) {
  run.set_out(a.out);
  const DrivingSpec driving = io::driving_from_json(run.input(a.driving));
  CircularSlitDisk domain;
  if (!a.domain.empty()) domain = io::slit_disk_from_json(run.input(a.domain));
  const double T = a.horizon >= 0.0 ? a.horizon : driving.grid.back();
  std::vector<double> times;
  for (std::size_t i = 0; i + 1 < driving.grid.size() && driving.grid[i] < T; ++i) {
    const double a0 = driving.grid[i], a1 = std::min(driving.grid[i + 1], T);
    for (int j = 0; j < a.per_interval; ++j) times.push_back(a0 + (a1 - a0) * double(j) / double(a.per_interval));
  }
  times.push_back(T);
  const auto curves = trace_hull(domain, driving, T, tol.evolution(), times);

  io::CsvWriter csv(run.out("hull.csv"), {"t", "slit", "re", "im"});
  for (const auto& c : curves)
    for (const auto& s : c.samples) csv.row({s.t, double(c.slit_index), s.z.real(), s.z.imag()});
  csv.close();
  HullConfig cfg;
  cfg.curves = curves;
  cfg.initial_domain = domain;
  cfg.horizon = T;
  io::write_json_file(run.out("hull.json"), io::to_json(cfg));

  auto& m = run.manifest();
  m.add_output(run.out("hull.csv"));
  m.add_output(run.out("hull.json"));
  m.tolerances["lift"] = {tol.evolution().lift, tol.evolution().lift_half};
  m.summary = {{"horizon", T}, {"slits", curves.size()}, {"samples_per_slit", curves.empty() ? 0 : curves[0].samples.size()}};
  return 0;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string config, out, grid;
  int n_grid = 17;
};

int cmd_extract(const ExtractArgs& a, const Tolerances& tol, Run& run) {
  run.set_out(a.out);
  HullConfig cfg = io::hull_config_from_json(run.input(a.config));
  validate_hull_config(cfg);
  const CapacityOptions copts = tol.capacity();
  auto& m = run.manifest();
  if (tol.reparam) {
    const ReparamResult rp = reparametrize_capacity(cfg, copts);
    cfg = rp.config;
    io::write_json_file(run.out("config_reparam.json"), io::to_json(cfg));
    m.add_output(run.out("config_reparam.json"));
    m.summary["reparam_max_knot_error"] = rp.max_knot_error;
  }
  std::vector<double> grid;
  if (!a.grid.empty()) {
    const json g = run.input(a.grid);
    grid = (g.is_object() ? g.at("grid") : g).get<std::vector<double>>();
  } else {
    for (int i = 1; i <= a.n_grid; ++i) grid.push_back(cfg.horizon * double(i) / double(a.n_grid));
  }
  const std::size_t m_slits = cfg.curves.size();

  const CapacityProfile prof = capacity_profile(cfg, grid, copts);
  std::vector<std::string> head{"t", "lmr"};
  for (std::size_t k = 0; k < m_slits; ++k) head.push_back("c_" + std::to_string(k + 1));
  head.insert(head.end(), {"sum_c", "sum_c_minus_t", "cauchy_gap"});
  {
    io::CsvWriter csv(run.out("capacity.csv"), head);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid[i], prof.lmr[i]};
      double s = 0.0;
      for (std::size_t k = 0; k < m_slits; ++k) {
        row.push_back(prof.c[k][i]);
        s += prof.c[k][i];
      }
      row.insert(row.end(), {s, s - grid[i], prof.cauchy_gap[i]});
      csv.row(row);
    }
  }

  const WeightEstimate w = weights(cfg, grid, 0.0, copts);
  head = {"t", "h"};
  for (std::size_t k = 0; k < m_slits; ++k) head.push_back("lambda_" + std::to_string(k + 1));
  head.push_back("sum_lambda");
  for (std::size_t k = 0; k < m_slits; ++k) head.push_back("gap_" + std::to_string(k + 1));
  {
    io::CsvWriter csv(run.out("weights.csv"), head);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid[i], w.h[i]};
      for (std::size_t k = 0; k < m_slits; ++k) row.push_back(w.lambda[k][i]);
      row.push_back(w.sum_lambda[i]);
      for (std::size_t k = 0; k < m_slits; ++k) row.push_back(w.gap[k][i]);
      csv.row(row);
    }
  }

  const DrivingSpec d = extract_driving(cfg, grid, copts);
  io::write_json_file(run.out("driving.json"), io::to_json(d));
  {
    io::CsvWriter csv(run.out("driving.csv"), {"t", "slit", "theta", "lambda"});
    for (std::size_t k = 0; k < d.slit_count(); ++k)
      for (std::size_t i = 0; i < d.grid.size(); ++i) csv.row({d.grid[i], double(k), d.theta[k][i], d.lambda[k][i]});
  }

  double sum_dev = 0.0, cap_dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sum_dev = std::max(sum_dev, std::abs(w.sum_lambda[i] - 1.0));
    double s = 0.0;
    for (std::size_t k = 0; k < m_slits; ++k) s += prof.c[k][i];
    cap_dev = std::max(cap_dev, std::abs(s - grid[i]));
  }
  for (const char* f : {"capacity.csv", "weights.csv", "driving.json", "driving.csv"}) m.add_output(run.out(f));
  m.summary["slits"] = m_slits;
  m.summary["grid_points"] = grid.size();
  m.summary["max_sum_lambda_deviation"] = sum_dev;
  m.summary["max_sum_c_minus_t"] = cap_dev;
  m.summary["depth"] = prof.depth;
  m.summary["final_norm"] = prof.final_norm;
  if (!prof.monotone) m.flags.push_back("capacity_not_monotone");
  return 0;
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
  std::string domain, zeta, grid, out;
};

int cmd_kernel(const KernelArgs& a, const Tolerances& tol, Run& run) {
  run.set_out(a.out);
  const CircularSlitDisk domain = io::slit_disk_from_json(run.input(a.domain));
  const cplx zeta = parse_complex(a.zeta);
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidInput, "zeta must lie on the unit circle");
  const std::vector<cplx> pts = io::points_from_json(run.input(a.grid));
  const KernelField phi = phi_kernel(domain, zeta, tol.laplace());
  const LaplaceDomain ld = LaplaceDomain::from_slit_disk(domain);

  std::size_t skipped = 0;
  double min_re = INFINITY;
  {
    io::CsvWriter csv(run.out("kernel.csv"), {"re_z", "im_z", "re_phi", "im_phi"});
    for (const cplx& z : pts) {
      cplx v(NAN, NAN);
      if (ld.contains(z)) {
        try {
          v = phi(z);
          min_re = std::min(min_re, v.real());
        } catch (const Error& e) {
          if (e.code() != ErrorCode::PoleHit) throw;
        }
      }
      if (std::isnan(v.real())) ++skipped;
      csv.row({z.real(), z.imag(), v.real(), v.imag()});
    }
  }
  json dump = io::to_json(phi);
  if (!domain.is_disk()) dump["bundle"] = io::to_json(harmonic_bundle(domain, tol.laplace()));
  io::write_json_file(run.out("kernel.json"), dump);

  auto& m = run.manifest();
  m.add_output(run.out("kernel.csv"));
  m.add_output(run.out("kernel.json"));
  m.summary = {{"zeta", io::to_json(zeta)},
               {"points", pts.size()},
               {"skipped", skipped},
               {"min_re_phi", std::isfinite(min_re) ? json(min_re) : json(nullptr)},
               {"residual", phi.residual},
               {"slit_values", phi.slit_values}};
  if (skipped) m.flags.push_back("points_outside_domain");
  return 0;
}

// ---------------------------------------------------------------- reparam

struct ReparamArgs {
  std::string config, out;
  std::vector<double> targets;
};

int cmd_reparam(const ReparamArgs& a, const Tolerances& tol, Run& run) {
  run.set_out(a.out);
  const HullConfig cfg = io::hull_config_from_json(run.input(a.config));
  const ReparamResult rp = reparametrize_capacity(cfg, tol.capacity(), a.targets);
  io::write_json_file(run.out("config.json"), io::to_json(rp.config));
  auto& m = run.manifest();
  m.add_output(run.out("config.json"));
  m.summary = {{"horizon", rp.config.horizon}, {"max_knot_error", rp.max_knot_error}, {"inserted", rp.inserted}};
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string out, only, dump;
  std::vector<std::string> fixtures;
  bool list = false;
};

int cmd_verify(const VerifyArgs& a, const Tolerances& tol, Run& run) {
  if (a.list) {
    for (const auto& c : verify::list_checks()) std::printf("%-4s %s\n", c.id.c_str(), c.name.c_str());
    return 0;
  }
  if (!a.dump.empty()) {
    fs::create_directories(a.dump);
    for (const auto& id : verify::fixture_ids()) {
      std::string name = id;
      for (char& c : name) c = char(std::tolower(c));
      io::write_json_file(fs::path(a.dump) / (name + ".json"), verify::default_fixture(id));
    }
    io::write_json_file(fs::path(a.dump) / "a3_perturbed.json", verify::perturbed_symmetry_fixture());
    return 0;
  }
  if (!a.out.empty()) run.set_out(a.out);
  verify::VerifyOptions vo;
  vo.threads = tol.threads;
  for (const auto& f : a.fixtures) {
    json j = run.input(f);
    if (!j.contains("check") || !j["check"].is_string())
      throw Error(ErrorCode::InvalidInput, f + ": fixture needs a \"check\" field");
    const std::string id = j["check"].get<std::string>();
    vo.fixtures[id] = std::move(j);
  }
  std::vector<std::string> ids;
  if (!a.only.empty()) {
    std::stringstream ss(a.only);
    std::string id;
    while (std::getline(ss, id, ',')) {
      verify::check_info(id);
      ids.push_back(id);
    }
  }
  const auto results = verify::run_suite(ids, vo);
  json report = json::array();
  std::vector<std::string> failed;
  for (const auto& r : results) {
    std::printf("%s\n", verify::format_result(r).c_str());
    report.push_back(verify::to_json(r));
    if (!r.passed) failed.push_back(r.id + " (" + r.name + ")");
  }
  auto& m = run.manifest();
  if (!a.out.empty()) {
    io::write_json_file(run.out("report.json"), report);
    m.add_output(run.out("report.json"));
  }
  m.summary = {{"checks", results.size()}, {"failed", failed.size()}};
  if (failed.empty()) return 0;
  std::string names;
  for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
  std::fprintf(stderr, "failed: %s\n", names.c_str());
  m.failure_code = "CheckFailed";
  m.failure_reason = names;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-slit radial Loewner toolkit"};
  app.require_subcommand(1);
  Tolerances tol;

  ForwardArgs fa;
  auto* forward = app.add_subcommand("forward", "evolve marked points under a driving");
  forward->add_option("config", fa.config, "config JSON (initial_domain, marked_points, horizon)")->required();
  forward->add_option("driving", fa.driving, "driving JSON")->required();
  forward->add_option("out_dir", fa.out)->required();
  forward->add_option("--points", fa.points, "extra marked points JSON");
  forward->add_option("--horizon", fa.horizon, "final time (default: config horizon or driving end)");

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace-hull", "trace the slit tips generated by a driving");
  trace->add_option("driving", ta.driving)->required();
  trace->add_option("out_dir", ta.out)->required();
  trace->add_option("--domain", ta.domain, "initial circularly slit disk JSON");
  trace->add_option("--horizon", ta.horizon);
  trace->add_option("--per-interval", ta.per_interval, "output times per driving grid interval")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  ExtractArgs ea;
  auto* extract = app.add_subcommand("extract", "capacity profile, weights and driving of a hull");
  extract->add_option("config", ea.config)->required();
  extract->add_option("out_dir", ea.out)->required();
  extract->add_option("--grid", ea.grid, "grid JSON (array or {\"grid\": [...]})");
  extract->add_option("--n-grid", ea.n_grid, "uniform grid size when no grid file is given")->capture_default_str();
  extract->add_flag("--reparam", tol.reparam, "reparametrize by capacity first");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "sample the kernel on a point grid");
  kernel->add_option("domain", ka.domain)->required();
  kernel->add_option("zeta", ka.zeta, "pole on the unit circle as re[,im]")->required();
  kernel->add_option("grid", ka.grid, "points JSON")->required();
  kernel->add_option("out_dir", ka.out)->required();

  ReparamArgs ra;
  auto* reparam = app.add_subcommand("reparam", "relabel knot times by capacity");
  reparam->add_option("config", ra.config)->required();
  reparam->add_option("out_dir", ra.out)->required();
  reparam->add_option("--targets", ra.targets, "capacity times to insert as knots")->delimiter(',');

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run the acceptance checks");
  ver->add_option("out_dir", va.out, "directory for report.json and manifest.json");
  ver->add_flag("--list", va.list, "list checks without running");
  ver->add_option("--only", va.only, "comma-separated check ids");
  ver->add_option("--fixture", va.fixtures, "fixture JSON replacing the built-in one named by its \"check\" field")->allow_extra_args(false);
  ver->add_option("--dump-fixtures", va.dump, "write the built-in fixtures to a directory");

  for (auto* c : {forward, trace, extract, kernel, reparam, ver}) add_tolerances(c, tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  Run run(cmd->get_name(), tol);
  try {
    int code = 0;
    if (cmd == forward) code = cmd_forward(fa, tol, run);
    else if (cmd == trace) code = cmd_trace(ta, tol, run);
    else if (cmd == extract) code = cmd_extract(ea, tol, run);
    else if (cmd == kernel) code = cmd_kernel(ka, tol, run);
    else if (cmd == reparam) code = cmd_reparam(ra, tol, run);
    else code = cmd_verify(va, tol, run);
    return run.finish(code, run.manifest().failure_code, run.manifest().failure_reason);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return run.finish(is_input_error(e.code()) ? 2 : 3, std::string(to_string(e.code())), e.what());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return run.finish(2, "InvalidInput", e.what());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return run.finish(2, "InvalidInput", e.what());
  }
}
