#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "fpp/distribution.hpp"
#include "fpp/group.hpp"
#include "fpp/passage.hpp"

namespace fpp::cli {

const std::vector<std::string>& experiment_names();

/// One failed check, naming the key and the rule.
struct Violation {
  std::string key;
  std::string rule;
  int line = 0;

  std::string message() const;
};

/// A validated configuration. Typed getters assume validation passed.
struct ExperimentConfig {
  std::string experiment;
  RawConfig raw;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;
  std::optional<GroupSpec> group;
  std::optional<DistributionSpec> distribution;
  SearchLimits limits;

  bool has(const std::string& key) const { return raw.find(key) != nullptr; }
  std::int64_t integer(const std::string& key, std::int64_t fallback = 0) const;
  double real(const std::string& key, double fallback = 0.0) const;
  bool boolean(const std::string& key, bool fallback = false) const;
  Element element(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
};

struct Validation {
  ExperimentConfig config;
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Full validation without running anything. `experiment` overrides the
/// config's own experiment key when given.
Validation validate_config(RawConfig raw, const std::optional<std::string>& experiment = std::nullopt);

/// Element literal for a group: integer or list of integers for lattices,
/// [u, v, w] for Heisenberg, a letter list or "0.1.2" / "e" for trees,
/// [left, right] for products. Throws fpp::InvalidArgument.
Element element_from_value(const GroupSpec& group, const Value& value);

}  // namespace fpp::cli
