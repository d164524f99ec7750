#pragma once

// Command harness behind the dpc-bench tool. Each command takes a JSON
// configuration document (see docs/config.md), fills defaults, validates
// it, and produces a CSV table. Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpc/bayes.hpp"
#include "dpc/fisher.hpp"
#include "dpc/photonics.hpp"

namespace dpc::bench {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Invalid configuration. key() names the offending entry, e.g. "detector.eta".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A numerical self-check did not hold.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2 };

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Shortest round-trip decimal, '.' separator, LF line endings.
  /// Infinite cells are written as "inf".
  std::string to_csv() const;
  std::size_t column(const std::string& name) const;
};

/// Overrides taken from the command line; they win over the document.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  bool full_scale = false;
  int threads = 1;
};

struct CommandResult {
  CsvTable table;
  /// Fully resolved configuration, defaults included.
  nlohmann::json resolved;
  /// Human-readable summary printed by the CLI.
  std::string report;
  int exit_code = kExitOk;
};

CommandResult cmd_fi_curve(const nlohmann::json& config, const RunOverrides& overrides = {});
CommandResult cmd_simulate(const nlohmann::json& config, const RunOverrides& overrides = {});
CommandResult cmd_saturate(const nlohmann::json& config, const RunOverrides& overrides = {});
CommandResult cmd_povm_check(const nlohmann::json& config, const RunOverrides& overrides = {});

/// Sidecar document recorded next to every CSV.
nlohmann::json metadata(const std::string& command, const CommandResult& result);

/// Runs `count` jobs on up to `threads` workers. Jobs write to their own
/// slots so the result order does not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, int threads, F&& job);

/// Entry point of the dpc-bench executable.
int run_cli(int argc, char** argv);

}  // namespace dpc::bench

#include "dpc/detail/parallel.hpp"
