#include "emtime/harness/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emtime/core/errors.hpp"

namespace emtime::harness {

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// The single point through which every output file is written.
class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

  OutputFile write(const std::string& name, const std::string& bytes) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
    return {path.string(), hex64(fnv1a(bytes))};
  }

 private:
  std::filesystem::path dir_;
};

int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_config;
  if (dynamic_cast<const IoError*>(&e)) return exit_io;
  return exit_numerical;
}

void write_manifest(RunManifest& m) {
  try {
    Writer(m.output_dir).write("manifest.json", m.to_json().dump(2) + "\n");
  } catch (const IoError& e) {
    if (m.exit_code == exit_ok) {
      m.status = "failed";
      m.exit_code = exit_io;
      m.error = e.what();
    }
  }
}

}  // namespace

Json RunManifest::to_json() const {
  Json stages_j = Json::array();
  for (const auto& s : stages) {
    Json r{{"name", s.name}, {"status", s.status}, {"seconds", s.seconds}};
    if (!s.error.empty()) r["error"] = s.error;
    stages_j.push_back(std::move(r));
  }
  Json outputs_j = Json::array();
  for (const auto& o : outputs) outputs_j.push_back({{"path", o.path}, {"fnv1a", o.digest}});
  Json j{{"artifact_version", artifact_version}, {"scenario", scenario}, {"config_hash", config_hash},
         {"seed", seed}, {"output_dir", output_dir}, {"status", status}, {"exit_code", exit_code},
         {"stages", std::move(stages_j)}, {"outputs", std::move(outputs_j)}};
  if (!error.empty()) j["error"] = error;
  return j;
}

std::string resolve_output_dir(const RunOptions& opts, const std::string& config_dir, const std::string& scenario) {
  if (opts.out_dir && !opts.out_dir->empty()) return *opts.out_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  if (!config_dir.empty()) return config_dir;
  return "out/" + (scenario.empty() ? std::string("unnamed") : scenario);
}

RunManifest run_scenario(const ScenarioConfig& config, const RunOptions& opts) {
  RunManifest m;
  m.scenario = config.scenario;
  m.config_hash = config_hash(config);
  m.seed = config.seed;
  m.output_dir = resolve_output_dir(opts, config.output_dir, config.scenario);
  StageLog log;
  std::vector<Table> tables;
  try {
    tables = run_pipeline(config, log);
  } catch (const std::exception& e) {
    m.status = "failed";
    m.exit_code = classify(e);
    m.error = e.what();
  }
  // Tables from a partly failed scan are still written.
  if (!log.all_ok() && m.exit_code == exit_ok) {
    m.status = "failed";
    m.exit_code = exit_numerical;
    for (const auto& s : log.records())
      if (s.status != "ok") {
        m.error = s.name + ": " + s.error;
        break;
      }
  }
  try {
    Writer w(m.output_dir);
    log.run("write", [&] {
      for (const auto& t : tables) {
        if (opts.format == OutputFormat::csv)
          m.outputs.push_back(w.write(t.name + ".csv", to_csv(t)));
        else
          m.outputs.push_back(w.write(t.name + ".json", harness::to_json(t).dump(1) + "\n"));
      }
    });
  } catch (const IoError& e) {
    m.status = "failed";
    if (m.exit_code == exit_ok) m.exit_code = exit_io;
    if (m.error.empty()) m.error = e.what();
  }
  m.stages = log.records();
  write_manifest(m);
  return m;
}

RunManifest run_document(const Json& document, const RunOptions& opts) {
  Json doc = document;
  if (opts.seed && doc.is_object()) doc["seed"] = *opts.seed;
  try {
    return run_scenario(parse_config(doc), opts);
  } catch (const Error& e) {  // anything raised while validating is a config error
    RunManifest m;
    if (doc.is_object() && doc.contains("scenario") && doc["scenario"].is_string())
      m.scenario = doc["scenario"].get<std::string>();
    std::string dir;
    if (doc.is_object() && doc.contains("output_dir") && doc["output_dir"].is_string())
      dir = doc["output_dir"].get<std::string>();
    m.output_dir = resolve_output_dir(opts, dir, m.scenario);
    m.config_hash = doc.is_object() ? hex64(fnv1a(doc.dump())) : std::string();
    m.seed = opts.seed.value_or(0);
    m.status = "failed";
    m.exit_code = exit_config;
    m.error = e.what();
    m.stages.push_back({"validate", "failed", 0.0, e.what()});
    write_manifest(m);
    return m;
  }
}

RunManifest run_source(const std::string& source, const RunOptions& opts) {
  Json doc;
  if (!std::filesystem::exists(source)) {
    bool builtin = false;
    for (const auto& s : list_scenarios()) builtin = builtin || s.name == source;
    if (!builtin) {
      RunManifest m;
      m.output_dir = resolve_output_dir(opts, {}, {});
      m.status = "failed";
      m.exit_code = exit_io;
      m.error = "cannot read config file " + source;
      write_manifest(m);
      return m;
    }
    doc = Json{{"scenario", source}};
  } else {
    std::ifstream in(source);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
      RunManifest m;
      m.output_dir = resolve_output_dir(opts, {}, {});
      m.status = "failed";
      m.exit_code = exit_config;
      m.error = std::string("/: invalid JSON: ") + e.what();
      m.stages.push_back({"validate", "failed", 0.0, m.error});
      write_manifest(m);
      return m;
    }
  }
  return run_document(doc, opts);
}

}  // namespace emtime::harness
