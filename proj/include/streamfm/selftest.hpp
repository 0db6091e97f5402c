#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace streamfm {

// Randomized oracle suites: the fast prediction against an exhaustive
// pairwise oracle, analytic gradients against finite differences, and the
// streaming metrics against brute-force recomputation. `perturb` names a
// suite whose computed values get nudged, as a negative control proving the
// oracle can fail.
struct SelftestOptions {
  std::uint64_t seed = 0;
  std::string perturb;  // "", "predict", "gradient", "imf", "lambda", "metrics"
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts, std::ostream& out);

bool selftest_passed(const std::vector<SuiteResult>& results);

}  // namespace streamfm
