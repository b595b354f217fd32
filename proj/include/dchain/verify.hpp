#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dchain {

// One numerical identity: `value` is an error measure that must not exceed `threshold`.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
  double worst_ratio() const;  // max value/threshold over the checks
};

struct VerifyOptions {
  std::size_t n = 12;   // largest n enumerated by the suites
  int trials = 10;      // random parameter draws per n
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

// conditional, pushforward, tv, pgf, variance-formula, delta, joint, signed, invariants
std::vector<std::string> suite_names();
// DomainError for an unknown name
SuiteResult run_suite(const std::string& name, const VerifyOptions& opt = {});

// Uniform p_3..p_n in [lo, hi] for the randomized suites.
std::vector<double> random_p_values(std::size_t n, std::uint64_t seed, double lo = 0.05, double hi = 0.95);

}  // namespace dchain
