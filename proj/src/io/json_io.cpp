#include "kloewner/error.hpp"
#include "kloewner/io.hpp"

#include <fstream>
#include <sstream>

namespace kloewner::io {
namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const json& field(const json& j, const char* key, const char* context) {
  if (!j.is_object()) schema_error(std::string(context) + " must be an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(std::string(context) + ": missing \"" + key + "\"");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) schema_error(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) schema_error(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

void line_column(std::string_view text, std::size_t byte, std::size_t& line, std::size_t& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

json hole_json(const Hole& h) {
  json j;
  j["kind"] = h.kind() == Hole::Kind::Arc ? "arc" : "jordan";
  j["circular"] = h.circular();
  j["center"] = to_json(h.center());
  j["scale"] = h.scale();
  json s = json::array();
  for (const cplx& z : h.samples()) s.push_back(to_json(z));
  j["samples"] = std::move(s);
  return j;
}

}  // namespace

json parse_json(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 0, col = 0;
    line_column(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << col << ": " << e.what();
    throw Error(ErrorCode::ParseError, msg.str(), int(line), int(col));
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) schema_error("complex number must be [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

json to_json(const CircularSlitDisk& domain) {
  json slits = json::array();
  for (const auto& s : domain.slits) slits.push_back({{"radius", s.radius}, {"alpha", s.alpha}, {"beta", s.beta}});
  return {{"slits", slits}};
}

CircularSlitDisk slit_disk_from_json(const json& j) {
  CircularSlitDisk d;
  if (j.is_null()) return d;
  const json& slits = j.is_array() ? j : field(j, "slits", "domain");
  if (!slits.is_array()) schema_error("slits must be an array");
  for (const auto& s : slits) {
    ArcSlit a;
    a.radius = number(field(s, "radius", "slit"), "radius");
    a.alpha = number(field(s, "alpha", "slit"), "alpha");
    a.beta = number(field(s, "beta", "slit"), "beta");
    d.slits.push_back(a);
  }
  return d;
}

json to_json(const HullConfig& config) {
  json curves = json::array();
  for (const auto& c : config.curves) {
    json samples = json::array();
    for (const auto& s : c.samples) samples.push_back({{"t", s.t}, {"z", to_json(s.z)}});
    curves.push_back({{"slit_index", c.slit_index}, {"samples", samples}});
  }
  return {{"horizon", config.horizon}, {"initial_domain", to_json(config.initial_domain)}, {"curves", curves}};
}

HullConfig hull_config_from_json(const json& j) {
  HullConfig cfg;
  cfg.horizon = number(field(j, "horizon", "config"), "horizon");
  if (j.contains("initial_domain")) cfg.initial_domain = slit_disk_from_json(j["initial_domain"]);
  const json& curves = field(j, "curves", "config");
  if (!curves.is_array()) schema_error("curves must be an array");
  int index = 0;
  for (const auto& c : curves) {
    SlitCurve curve;
    curve.slit_index = c.contains("slit_index") ? c["slit_index"].get<int>() : index;
    const json& samples = field(c, "samples", "curve");
    if (!samples.is_array()) schema_error("samples must be an array");
    for (const auto& s : samples) {
      curve.samples.push_back({number(field(s, "t", "sample"), "t"), complex_from_json(field(s, "z", "sample"))});
    }
    cfg.curves.push_back(std::move(curve));
    ++index;
  }
  return cfg;
}

json to_json(const DrivingSpec& driving) {
  return {{"grid", driving.grid}, {"theta", driving.theta}, {"lambda", driving.lambda}};
}

DrivingSpec driving_from_json(const json& j) {
  DrivingSpec d;
  d.grid = numbers(field(j, "grid", "driving"), "grid");
  const json& theta = field(j, "theta", "driving");
  const json& lambda = field(j, "lambda", "driving");
  if (!theta.is_array() || !lambda.is_array()) schema_error("theta and lambda must be arrays of arrays");
  for (const auto& row : theta) d.theta.push_back(numbers(row, "theta"));
  for (const auto& row : lambda) d.lambda.push_back(numbers(row, "lambda"));
  return d;
}

std::vector<cplx> points_from_json(const json& j) {
  const json& arr = j.is_object() ? field(j, "points", "grid") : j;
  if (!arr.is_array()) schema_error("points must be an array");
  std::vector<cplx> out;
  out.reserve(arr.size());
  for (const auto& p : arr) out.push_back(complex_from_json(p));
  return out;
}

json to_json(const ConformalMapRep& map) {
  json stages = json::array();
  for (const auto& s : map.stages) {
    stages.push_back({{"base", to_json(s.base)},
                      {"k", s.k},
                      {"height", s.height},
                      {"q", to_json(s.q)},
                      {"rot", to_json(s.rot)},
                      {"lmr", s.lmr},
                      {"slit", s.slit}});
  }
  json tips = json::array(), images = json::array();
  for (const cplx& z : map.tips) tips.push_back(to_json(z));
  for (const cplx& z : map.tip_images) images.push_back(to_json(z));
  return {{"stages", stages},     {"final_rotation", to_json(map.final_rotation)},
          {"total_lmr", map.total_lmr}, {"tips", tips},
          {"tip_images", images}, {"guard", map.guard}};
}

json to_json(const LaplaceSolution& u) {
  json holes = json::array();
  if (u.domain)
    for (const auto& h : u.domain->holes) holes.push_back(hole_json(h));
  std::vector<double> coeffs(u.coeffs.data(), u.coeffs.data() + u.coeffs.size());
  return {{"basis",
           {{"layout", "1, Re z^n, Im z^n (n = 1..poly_degree), then per hole: log|l|, Re psi^n, Im psi^n"},
            {"poly_degree", u.basis.poly_degree},
            {"hole_degree", u.basis.hole_degree},
            {"holes", holes}}},
          {"coefficients", coeffs},
          {"fit_residual", u.fit_residual},
          {"residual", u.residual}};
}

json to_json(const HarmonicBundle& bundle) {
  json omega = json::array();
  for (const auto& w : bundle.omega) omega.push_back(to_json(w));
  json period = json::array();
  for (Eigen::Index i = 0; i < bundle.period.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < bundle.period.cols(); ++k) row.push_back(bundle.period(i, k));
    period.push_back(std::move(row));
  }
  std::vector<double> eig(bundle.eigenvalues.data(), bundle.eigenvalues.data() + bundle.eigenvalues.size());
  return {{"omega", omega},
          {"period", period},
          {"eigenvalues", eig},
          {"asymmetry", bundle.asymmetry},
          {"contour_mismatch", bundle.contour_mismatch},
          {"condition", bundle.condition},
          {"residual", bundle.residual}};
}

json to_json(const KernelField& kernel) {
  return {{"zeta", to_json(kernel.zeta)},
          {"scale", kernel.scale},
          {"imag_shift", kernel.imag_shift},
          {"raw_origin", kernel.raw_origin},
          {"residual", kernel.residual},
          {"slit_values", kernel.slit_values},
          {"guard", kernel.guard},
          {"corrector", to_json(kernel.corrector)}};
}

}  // namespace kloewner::io
