#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mqt/curve.hpp"

// Self-checks behind `mqt verify SUITE`. Each suite evaluates module
// invariants at desk scale and reports one line per check.
namespace mqt::verify {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const;
};

/// The five named presets with K levels (translation, scaling, split_merge,
/// moving_point, constant).
std::vector<std::pair<std::string, MarginalCurve>> preset_curves(int levels);

/// energy, action-equality, markov, mq, oracle, continuity, all.
std::vector<std::string> suite_names();

/// Throws PreconditionError for an unknown suite.
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 20240611);

nlohmann::json to_json(const SuiteReport& report);

}  // namespace mqt::verify
