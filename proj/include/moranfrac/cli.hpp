#pragma once

// Command-line driver. Subcommands: construct, spectrum, local-spectrum,
// entropy, legendre, coarse, nu-sample, verify.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "moranfrac/moran.hpp"

namespace moranfrac::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitResourceBudget = 3,
};

// {m, model: {kind, p, r | p_left, p_right, r_left, r_right}, gap, depth,
//  kappa, layout, cell_budget}. Missing keys keep their defaults; throws
// ConfigError on malformed input and validates the result.
MoranConfig parse_config(std::string_view json_text);

// Canonical JSON echo of a resolved config (sorted keys).
std::string config_to_json(const MoranConfig& config);

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "==" or "in"
  double slack = 0.0;    // distance to failure, negative when failed
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  bool pass() const;
};

// Named verification suites on canonical configurations.
//   covering, moran, sandwich, decay, counterexample, formalism
SuiteResult run_suite(const std::string& name, std::uint64_t seed);
std::vector<std::string> suite_names();

// Entry point used by the executable; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace moranfrac::cli
