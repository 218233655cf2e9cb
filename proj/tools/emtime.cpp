#include <omp.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/harness/config.hpp"
#include "emtime/harness/runner.hpp"
#include "emtime/harness/scenarios.hpp"

using namespace emtime;
using namespace emtime::harness;

namespace {

int cmd_list(OutputFormat format) {
  if (format == OutputFormat::json) {
    Json out = Json::array();
    for (const auto& s : list_scenarios())
      out.push_back({{"name", s.name}, {"description", s.description}, {"scan_parameters", s.scan_parameters}});
    std::cout << out.dump(2) << "\n";
    return exit_ok;
  }
  for (const auto& s : list_scenarios()) std::printf("%-26s %s\n", s.name.c_str(), s.description.c_str());
  return exit_ok;
}

int cmd_validate(const std::string& path) {
  try {
    const auto cfg = load_config(path);
    std::cout << "valid " << cfg.scenario << " " << config_hash(cfg) << "\n";
    return exit_ok;
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return exit_config;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return exit_io;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
}

int cmd_run(const std::string& source, const RunOptions& opts) {
  const auto m = run_source(source, opts);
  if (m.exit_code == exit_ok) {
    std::cout << m.scenario << ": ok, " << m.outputs.size() << " tables in " << m.output_dir << " (config "
              << m.config_hash << ")\n";
  } else {
    std::cerr << (m.scenario.empty() ? std::string("run") : m.scenario) << ": failed (exit " << m.exit_code
              << "): " << m.error << "\nmanifest: " << m.output_dir << "/manifest.json\n";
  }
  return m.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emergent-time composite experiments"};
  app.require_subcommand(1);

  int jobs = 0;
  std::string out_dir;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  app.add_option("--jobs", jobs, "Worker threads for independent scan points (0: OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "Output directory; overrides the config and the environment");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "Seed replacing the config value");
  app.fallthrough();

  std::string run_source_arg, validate_path;
  auto* run = app.add_subcommand("run", "Run a config file or a builtin scenario by name");
  run->add_option("config", run_source_arg, "Config JSON path or builtin scenario name")->required();
  auto* list = app.add_subcommand("list", "List builtin scenarios");
  auto* validate = app.add_subcommand("validate", "Validate a config file without running it");
  validate->add_option("config", validate_path, "Config JSON path")->required();
  auto* version = app.add_subcommand("version", "Print the artifact version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_config;
  }

  if (jobs > 0) omp_set_num_threads(jobs);
  const OutputFormat fmt = format == "json" ? OutputFormat::json : OutputFormat::csv;

  if (*version) {
    std::cout << "emtime " << kVersion << "\n";
    return exit_ok;
  }
  if (*list) return cmd_list(fmt);
  if (*validate) return cmd_validate(validate_path);
  RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  opts.format = fmt;
  opts.seed = seed;
  (void)run;
  return cmd_run(run_source_arg, opts);
}
