#include "emtime/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "emtime/core/errors.hpp"
#include "emtime/harness/scenarios.hpp"

namespace emtime::harness {

namespace {

std::string escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + escape(key); }

/// One JSON object checked against a fixed key set.
class Section {
 public:
  Section(const Json& j, std::string ptr, std::initializer_list<const char*> allowed) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw ConfigError(where(), "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j_.items())
      if (!keys.count(k)) throw ConfigError(child(ptr_, k), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return child(ptr_, key); }
  const Json& raw(const char* key) const {
    if (!j_.contains(key)) throw ConfigError(at(key), "missing required key");
    return j_.at(key);
  }

  double number(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
    return d;
  }
  double number_or(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }
  double positive(const char* key) const {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError(at(key), "must be positive");
    return d;
  }
  std::optional<double> optional_number(const char* key) const {
    if (!has(key) || j_.at(key).is_null()) return std::nullopt;
    return number(key);
  }
  std::size_t count(const char* key, std::size_t min) const {
    const auto& v = raw(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(at(key), "expected a non-negative integer");
    const auto n = v.get<std::size_t>();
    if (n < min) throw ConfigError(at(key), "must be at least " + std::to_string(min));
    return n;
  }
  std::string string(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
        throw ConfigError(at(key) + "/" + std::to_string(i), "expected a finite number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::string where() const { return ptr_.empty() ? "/" : ptr_; }

 private:
  const Json& j_;
  std::string ptr_;
};

std::string type_of(const Json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object with a \"type\" key");
  if (!j.contains("type") || !j["type"].is_string()) throw ConfigError(ptr + "/type", "expected a string");
  return j["type"].get<std::string>();
}

Potential1D parse_potential(const Json& j, const std::string& ptr) {
  const auto type = type_of(j, ptr);
  if (type == "harmonic") {
    Section s(j, ptr, {"type", "k", "center"});
    return Harmonic{s.number_or("k", 1.0), s.number_or("center", 0.0)};
  }
  if (type == "linear") {
    Section s(j, ptr, {"type", "slope"});
    return Linear{s.number("slope")};
  }
  if (type == "constant") {
    Section s(j, ptr, {"type", "value"});
    return Constant{s.number_or("value", 0.0)};
  }
  if (type == "gaussian_well") {
    Section s(j, ptr, {"type", "depth", "width", "center"});
    return GaussianWell{s.number_or("depth", 1.0), s.has("width") ? s.positive("width") : 1.0, s.number_or("center", 0.0)};
  }
  if (type == "tabulated") {
    Section s(j, ptr, {"type", "min", "max", "samples"});
    const double lo = s.number("min"), hi = s.number("max");
    if (!(hi > lo)) throw ConfigError(s.at("max"), "must exceed min");
    auto samples = s.numbers("samples");
    if (samples.size() < 4) throw ConfigError(s.at("samples"), "needs at least 4 samples");
    const Grid1D g(lo, hi, samples.size());
    return Tabulated(g, std::move(samples));
  }
  if (type == "double_well") {
    // barrier·((x/a)² − 1)² sampled on n nodes and interpolated as a tabulated potential.
    Section s(j, ptr, {"type", "barrier", "half_separation", "min", "max", "n"});
    const double B = s.positive("barrier"), a = s.positive("half_separation");
    const double lo = s.number("min"), hi = s.number("max");
    if (!(hi > lo)) throw ConfigError(s.at("max"), "must exceed min");
    const Grid1D g(lo, hi, s.count("n", 4));
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double u = g[i] / a;
      v[i] = B * (u * u - 1.0) * (u * u - 1.0);
    }
    return Tabulated(g, std::move(v));
  }
  throw ConfigError(ptr + "/type", "unknown potential type \"" + type + "\"");
}

Coupling2D parse_coupling(const Json& j, const std::string& ptr) {
  const auto type = type_of(j, ptr);
  if (type == "zero") {
    Section s(j, ptr, {"type"});
    return ZeroCoupling{};
  }
  if (type == "bilinear") {
    Section s(j, ptr, {"type", "lambda"});
    return Bilinear{s.number("lambda")};
  }
  if (type == "separable") {
    Section s(j, ptr, {"type", "g", "h"});
    return Separable{parse_potential(s.raw("g"), s.at("g")), parse_potential(s.raw("h"), s.at("h"))};
  }
  if (type == "windowed_pulse") {
    Section s(j, ptr, {"type", "amplitude", "R0", "sigma", "h"});
    WindowedPulse w{s.number("amplitude"), s.number_or("R0", 0.0), s.has("sigma") ? s.positive("sigma") : 1.0,
                    Linear{1.0}};
    if (s.has("h")) w.h = parse_potential(s.raw("h"), s.at("h"));
    return w;
  }
  throw ConfigError(ptr + "/type", "unknown coupling type \"" + type + "\"");
}

/// Recursive overlay; objects carrying a "type" key are replaced whole.
void overlay(Json& base, const Json& patch) {
  for (const auto& [k, v] : patch.items()) {
    if (base.contains(k) && base[k].is_object() && v.is_object() && !base[k].contains("type"))
      overlay(base[k], v);
    else
      base[k] = v;
  }
}

void scenario_checks(const ScenarioConfig& c, const ScenarioInfo& info) {
  if (info.scan_parameters.empty()) {
    if (!c.scan.values.empty() || !c.scan.parameter.empty())
      throw ConfigError("/scan", "scenario \"" + c.scenario + "\" takes no scan");
  } else {
    bool known = false;
    for (const auto& p : info.scan_parameters) known = known || p == c.scan.parameter;
    if (!known) throw ConfigError("/scan/parameter", "unsupported scan parameter \"" + c.scan.parameter + "\"");
    if (c.scan.values.size() < 3) throw ConfigError("/scan/values", "needs at least 3 values");
    for (std::size_t i = 0; i < c.scan.values.size(); ++i) {
      if (!(c.scan.values[i] > 0.0)) throw ConfigError("/scan/values/" + std::to_string(i), "must be positive");
      if (i > 0 && !(c.scan.values[i] > c.scan.values[i - 1]))
        throw ConfigError("/scan/values/" + std::to_string(i), "values must increase");
    }
  }
  const auto needs_Ec = [&] {
    if (!c.composite.E_c || !(*c.composite.E_c > 0.0)) throw ConfigError("/composite/E_c", "must be a positive number");
  };
  if (c.scenario == "perfect-clock") {
    needs_Ec();
    if (!(c.grid.R_min > 0.0)) throw ConfigError("/grid/R_min", "must be positive for the Gaussian clock");
  } else if (c.scenario == "harmonic-clock-two-level") {
    needs_Ec();
    if (c.solver.channels < 2) throw ConfigError("/solver/channels", "must be at least 2");
  } else if (c.scenario == "beam-on-atom") {
    needs_Ec();
    if (c.solver.channels < 2) throw ConfigError("/solver/channels", "must be at least 2");
  } else if (c.scenario == "jacobi-paths") {
    if (!c.composite.E) throw ConfigError("/composite/E", "must be set");
    if (c.path.start.size() != 2) throw ConfigError("/path/start", "expected two coordinates (R, x)");
    if (c.path.end.size() != 2) throw ConfigError("/path/end", "expected two coordinates (R, x)");
  }
}

}  // namespace

ScenarioConfig parse_config(const Json& user) {
  if (!user.is_object()) throw ConfigError("/", "expected an object");
  if (!user.contains("scenario")) throw ConfigError("/scenario", "missing required key");
  if (!user["scenario"].is_string()) throw ConfigError("/scenario", "expected a string");
  const auto& info = find_scenario(user["scenario"].get<std::string>());

  ScenarioConfig c;
  c.document = default_document(info.name);
  overlay(c.document, user);
  const Json& d = c.document;
  Section top(d, "", {"scenario", "seed", "output_dir", "composite", "grid", "solver", "dynamics", "path", "scan"});
  c.scenario = info.name;
  c.seed = top.count("seed", 0);
  c.output_dir = top.string("output_dir");

  Section comp(d.at("composite"), "/composite", {"M", "m", "hbar", "E", "E_c", "V_env", "V_sys", "V_int"});
  c.composite.M = comp.positive("M");
  c.composite.m = comp.positive("m");
  c.composite.hbar = comp.positive("hbar");
  c.composite.E = comp.optional_number("E");
  c.composite.E_c = comp.optional_number("E_c");
  c.composite.V_env = parse_potential(comp.raw("V_env"), comp.at("V_env"));
  c.composite.V_sys = parse_potential(comp.raw("V_sys"), comp.at("V_sys"));
  c.composite.V_int = parse_coupling(comp.raw("V_int"), comp.at("V_int"));
  try {
    c.composite.validate();
  } catch (const DomainError& e) {
    throw ConfigError("/composite", e.what());
  }

  Section grid(d.at("grid"), "/grid", {"x_min", "x_max", "nx", "R_min", "R_max", "nR"});
  c.grid.x_min = grid.number("x_min");
  c.grid.x_max = grid.number("x_max");
  c.grid.nx = grid.count("nx", 3);
  c.grid.R_min = grid.number("R_min");
  c.grid.R_max = grid.number("R_max");
  c.grid.nR = grid.count("nR", 3);
  if (!(c.grid.x_max > c.grid.x_min)) throw ConfigError("/grid/x_max", "must exceed x_min");
  if (!(c.grid.R_max > c.grid.R_min)) throw ConfigError("/grid/R_max", "must exceed R_min");

  Section sol(d.at("solver"), "/solver",
              {"tol", "channels", "candidates", "order", "taper", "margin", "points_per_wavelength", "min_nR", "max_iter"});
  c.solver.tol = sol.positive("tol");
  c.solver.channels = sol.count("channels", 1);
  c.solver.candidates = sol.count("candidates", 1);
  const auto order = sol.string("order");
  if (order == "second") c.solver.order = StencilOrder::second;
  else if (order == "fourth") c.solver.order = StencilOrder::fourth;
  else throw ConfigError(sol.at("order"), "expected \"second\" or \"fourth\"");
  c.solver.taper = sol.positive("taper");
  if (!(c.solver.taper < 0.5)) throw ConfigError(sol.at("taper"), "must be below 0.5");
  c.solver.margin = sol.number("margin");
  if (c.solver.margin < 0.0 || !(c.solver.margin < 0.5)) throw ConfigError(sol.at("margin"), "must lie in [0, 0.5)");
  c.solver.points_per_wavelength = sol.positive("points_per_wavelength");
  c.solver.min_nR = sol.count("min_nR", 3);
  c.solver.max_iter = sol.count("max_iter", 1);

  Section dyn(d.at("dynamics"), "/dynamics", {"v", "x0", "p0", "t_end", "steps", "rabi_coupling"});
  c.dynamics.v = dyn.positive("v");
  c.dynamics.x0 = dyn.number("x0");
  c.dynamics.p0 = dyn.number("p0");
  c.dynamics.t_end = dyn.positive("t_end");
  c.dynamics.steps = dyn.count("steps", 2);
  c.dynamics.rabi_coupling = dyn.number("rabi_coupling");

  Section path(d.at("path"), "/path", {"start", "end", "segments", "delta"});
  c.path.start = path.numbers("start");
  c.path.end = path.numbers("end");
  c.path.segments = path.count("segments", 2);
  c.path.delta = path.positive("delta");

  Section scan(d.at("scan"), "/scan", {"parameter", "values"});
  c.scan.parameter = scan.string("parameter");
  c.scan.values = scan.numbers("values");

  scenario_checks(c, info);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ScenarioConfig& config) {
  Json d = config.document;
  d.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(d.dump())));
  return buf;
}

}  // namespace emtime::harness
