// Seeded property sweeps for the inequality checks: trace-distance
// contractivity, relative-entropy / Holevo monotonicity, the Fannes estimate
// and the perturbed-ensemble bound. Sample i of a sweep draws everything
// from Rng(derive_seed(master, i)); that seed is reported with each failure
// and `replay` re-runs exactly that sample.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qsrc {

enum class PropertySuite { contractivity, monotonicity, fannes, lemma };

std::string to_string(PropertySuite suite);

struct PropertyFailure {
  std::string check;
  std::uint64_t sample_seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;  // sampled dimensions etc.
};

struct PropertyResult {
  std::string name;
  std::size_t samples = 0;    // samples drawn
  std::size_t checked = 0;    // inequality instances evaluated
  std::size_t skipped = 0;    // not applicable (infinite relative entropy, distance > 1/2, ...)
  double worst_slack = 0.0;   // min over checks of rhs - lhs
  std::vector<PropertyFailure> failures;

  bool passed() const { return failures.empty() && checked > 0; }
};

/// Fannes draws samples until `count` applicable pairs were checked (at most
/// 4 * count draws); the other suites draw exactly `count` samples.
PropertyResult run_suite(PropertySuite suite, std::size_t count, std::uint64_t master_seed);

/// Re-runs one sample; the result holds that sample's checks only.
PropertyResult replay(PropertySuite suite, std::uint64_t sample_seed);

/// Builds a trace-decreasing operator set (sum V^dag V = 0.9 I) and reports
/// whether channel validation rejected it. passed() is true on rejection.
PropertyResult tampered_channel_control();

}  // namespace qsrc
