#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kbm {

struct CheckResult {
  std::string name;
  int passed = 0;
  int total = 0;
};

struct CheckSummary {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Runs the seeded invariant suite (kernel positivity, interpolation
/// identities, conversion exactness, trace identity, membership
/// soundness). Deterministic for a fixed seed.
CheckSummary run_checks(std::uint64_t seed);

std::string summary_to_json_string(const CheckSummary& summary);

}  // namespace kbm
