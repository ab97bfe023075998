#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "experiment_config.hpp"

namespace fpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitAssertion = 4;

const char* tool_version() noexcept;

struct Assertion {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct OutputTable {
  /// Appended to the prefix before ".csv"; empty for the main table.
  std::string suffix;
  CsvTable table;
};

struct ExperimentResult {
  std::vector<OutputTable> tables;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Assertion> assertions;
};

/// Runs the experiment in memory. A pure function of the config apart from
/// the worker count, which never changes the result.
ExperimentResult execute(const ExperimentConfig& config);

/// Hex digest of the canonical config, excluding workers and out.
std::string inputs_hash(const ExperimentConfig& config);

/// 64-bit mix64-absorption digest of a byte string, as 16 hex digits.
std::string content_hash(const std::string& bytes);

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::ordered_json manifest;
  std::vector<std::string> written;
};

/// execute() plus <prefix>.csv, any extra tables and <prefix>.manifest.json.
RunOutcome run(const ExperimentConfig& config, bool assert_mode);

}  // namespace fpp::cli
