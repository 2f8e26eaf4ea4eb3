#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace stripwall {

struct VerifyOptions {
  bool fast = false;           // reduced grids
  std::uint64_t seed = 0;      // random fields and perturbations
  // Test-harness mutation: the gradient under test has the boundary-penalty
  // contribution with its sign flipped.
  bool inject_boundary_sign_fault = false;
};

struct CheckResult {
  std::string name;    // "<module>.<property>"
  bool passed = false;
  double value = 0.0;  // measured quantity compared against tolerance
  double tolerance = 0.0;
  bool at_least = false;  // pass when value >= tolerance (default: value <= tolerance)
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  double calibrated_C = 0.0;  // lower-bound constant of the nonlocal term
  bool all_passed() const;
  std::vector<std::string> failures() const;
};

// Runs the invariant suite of every module. Never throws for a failing
// check; an exception inside a check is recorded as a failure.
VerifyReport run_verify(const VerifyOptions& opts);

nlohmann::json to_json(const VerifyReport& report, const VerifyOptions& opts);
void write_verify_json(const std::filesystem::path& path, const VerifyReport& report, const VerifyOptions& opts);

}  // namespace stripwall
