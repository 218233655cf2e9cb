#pragma once

#include <chrono>
#include <exception>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "emtime/harness/config.hpp"
#include "emtime/harness/table.hpp"

namespace emtime::harness {

struct StageRecord {
  std::string name;
  std::string status;  // "ok" or "failed"
  double seconds = 0.0;
  std::string error;
};

/// Times named pipeline stages and records their outcome.
class StageLog {
 public:
  /// Runs f, records it and rethrows anything it throws.
  template <class F>
  auto run(const std::string& name, F&& f) -> decltype(f()) {
    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        records_.push_back({name, "ok", seconds(), {}});
      } else {
        auto r = f();
        records_.push_back({name, "ok", seconds(), {}});
        return r;
      }
    } catch (const std::exception& e) {
      records_.push_back({name, "failed", seconds(), e.what()});
      throw;
    }
  }

  /// Records an outcome produced elsewhere, e.g. a failed scan point.
  void record(StageRecord r) { records_.push_back(std::move(r)); }

  const std::vector<StageRecord>& records() const noexcept { return records_; }
  bool all_ok() const noexcept;

 private:
  std::vector<StageRecord> records_;
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::vector<std::string> scan_parameters;  // empty: the scenario takes no scan
};

/// Builtin scenarios in registry order.
const std::vector<ScenarioInfo>& list_scenarios();

/// Registry entry; ConfigError at "/scenario" for unknown names.
const ScenarioInfo& find_scenario(const std::string& name);

/// Defaults of a builtin scenario as a config document.
Json default_document(const std::string& name);

/// Executes the named pipeline and returns its tables in a fixed order.
std::vector<Table> run_pipeline(const ScenarioConfig& config, StageLog& log);

}  // namespace emtime::harness
