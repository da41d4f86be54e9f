#pragma once

// Validation bundles: analytic results checked against closed forms and
// Monte Carlo at desk scale.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace freespec::cli {

struct SuiteParams {
  int n = 0;       // 0 selects the suite default
  int trials = 0;  // 0 selects the suite default
  std::uint64_t seed = 7;
  unsigned workers = 0;
};

struct Check {
  std::string name;
  double observed = 0.0;
  double threshold = 0.0;
  /// Pass when observed >= threshold instead of <=.
  bool at_least = false;
  bool passed = false;
};

struct SuiteReport {
  std::string suite;
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& suite_names();

/// wigner, freeness, convolution, detequiv or capacity. Throws UsageError
/// for an unknown name.
SuiteReport validate_suite(const std::string& name, const SuiteParams& params);

}  // namespace freespec::cli
