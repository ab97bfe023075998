#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiment_config.hpp"
#include "fpp/error.hpp"
#include "runner.hpp"

namespace {

using namespace fpp::cli;

struct Options {
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  bool assert_mode = false;
};

int report_violations(const std::vector<Violation>& violations) {
  for (const auto& v : violations) std::cerr << "fpp: " << v.message() << "\n";
  return kExitConfig;
}

int run_validate(const Options& opt) {
  RawConfig raw = RawConfig::load(opt.config_path);
  const Validation v = validate_config(std::move(raw));
  if (!v.ok()) return report_violations(v.violations);
  std::cout << "ok: " << v.config.experiment << "\n";
  return kExitOk;
}

int run_experiment(const Options& opt) {
  RawConfig raw = RawConfig::load(opt.config_path);
  if (opt.seed) raw.set("seed", make_integer(*opt.seed));
  if (opt.workers) raw.set("workers", make_integer(*opt.workers));
  if (opt.out) raw.set("out", make_string(*opt.out));
  Validation v = validate_config(std::move(raw), opt.experiment);
  if (!v.ok()) return report_violations(v.violations);

  const bool assert_mode = opt.assert_mode || v.config.boolean("assert", false);
  const RunOutcome outcome = run(v.config, assert_mode);
  for (const auto& path : outcome.written) std::cout << path << "\n";
  if (outcome.exit_code == kExitAssertion) {
    for (const auto& a : outcome.manifest["assertions"]) {
      if (!a["pass"].get<bool>()) {
        std::cerr << "fpp: assertion failed: " << a["name"].get<std::string>();
        const auto detail = a["detail"].get<std::string>();
        if (!detail.empty()) std::cerr << " (" << detail << ")";
        std::cerr << "\n";
      }
    }
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage percolation experiments on Cayley graphs", "fpp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  Options opt;
  CLI::App* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", opt.config_path, "Config file")->required()->check(CLI::ExistingFile);

  for (const auto& name : experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", opt.config_path, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Master seed (overrides the config)");
    sub->add_option("--workers", opt.workers, "Worker threads; 0 uses every hardware thread");
    sub->add_option("--out", opt.out, "Output path prefix");
    sub->add_flag("--assert", opt.assert_mode, "Exit with status 4 when an acceptance check fails");
    sub->callback([&opt, name] { opt.experiment = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(opt);
    return run_experiment(opt);
  } catch (const ConfigError& e) {
    std::cerr << "fpp: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fpp::HypothesisViolation& e) {
    std::cerr << "fpp: hypothesis violated (" << e.rule() << "): " << e.what() << "\n";
    return kExitConfig;
  } catch (const fpp::BudgetExceeded& e) {
    std::cerr << "fpp: budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "fpp: error: " << e.what() << "\n";
    return kExitFailure;
  }
}
