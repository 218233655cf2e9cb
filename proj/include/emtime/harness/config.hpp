#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "emtime/core/composite.hpp"
#include "emtime/core/stencil.hpp"
#include "json.hpp"

namespace emtime::harness {

using Json = nlohmann::json;

struct GridConfig {
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t nx = 41;
  double R_min = 0.0;
  double R_max = 20.0;
  std::size_t nR = 401;
};

struct SolverConfig {
  double tol = 1e-10;
  std::size_t channels = 2;
  std::size_t candidates = 6;
  StencilOrder order = StencilOrder::fourth;
  double taper = 0.15;
  double margin = 0.05;
  double points_per_wavelength = 16.0;
  std::size_t min_nR = 401;
  std::size_t max_iter = 200000;
};

struct DynamicsConfig {
  double v = 1.0;
  double x0 = 1.0;
  double p0 = 0.0;
  double t_end = 10.0;
  std::size_t steps = 1000;
  double rabi_coupling = 0.2;
};

/// Endpoints are (R, x).
struct PathConfig {
  std::vector<double> start{0.0, 0.0};
  std::vector<double> end{1.0, 1.0};
  std::size_t segments = 16;
  double delta = 1e-4;
};

struct ScanConfig {
  std::string parameter;
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string scenario;
  CompositeSpec composite;
  GridConfig grid;
  SolverConfig solver;
  DynamicsConfig dynamics;
  PathConfig path;
  ScanConfig scan;
  std::string output_dir;
  std::uint64_t seed = 1;
  Json document;  // effective document: scenario defaults overlaid by the user's entries
};

/// Overlays `user` on the defaults of the scenario it names and validates the
/// result. Unknown keys, wrong types and out-of-range values raise ConfigError
/// carrying the JSON-pointer path of the offending entry.
ScenarioConfig parse_config(const Json& user);

/// Reads and parses a config file. IoError when unreadable, ConfigError on a
/// syntax or schema violation.
ScenarioConfig load_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// FNV-1a of the canonical effective document without output_dir, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

}  // namespace emtime::harness
