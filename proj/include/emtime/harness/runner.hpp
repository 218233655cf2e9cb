#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emtime/harness/config.hpp"
#include "emtime/harness/scenarios.hpp"

namespace emtime::harness {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable that overrides the output directory named in a config.
inline constexpr const char* kOutputDirEnv = "EMTIME_OUTPUT_DIR";

enum class OutputFormat { csv, json };

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_io = 4 };

struct RunOptions {
  std::optional<std::string> out_dir;  // wins over the environment and the config
  OutputFormat format = OutputFormat::csv;
  std::optional<std::uint64_t> seed;   // replaces the config seed before hashing
};

struct OutputFile {
  std::string path;
  std::string digest;  // FNV-1a of the file bytes, 16 hex digits
};

struct RunManifest {
  std::string artifact_version = kVersion;
  std::string scenario;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string status = "ok";  // "ok" or "failed"
  int exit_code = exit_ok;
  std::string error;
  std::vector<StageRecord> stages;
  std::vector<OutputFile> outputs;

  Json to_json() const;
};

/// Output directory: options, then the environment override, then the config,
/// then "out/<scenario>".
std::string resolve_output_dir(const RunOptions& opts, const std::string& config_dir, const std::string& scenario);

/// Runs a validated config and writes tables plus manifest.json. Numerical and
/// I/O failures are recorded in the returned manifest, never thrown.
RunManifest run_scenario(const ScenarioConfig& config, const RunOptions& opts = {});

/// Parses the document and runs it. Config errors also produce a manifest,
/// written to the resolved output directory.
RunManifest run_document(const Json& document, const RunOptions& opts = {});

/// Loads a config file, or the builtin defaults when `source` names a
/// registered scenario and no such file exists, then runs it.
RunManifest run_source(const std::string& source, const RunOptions& opts = {});

}  // namespace emtime::harness
