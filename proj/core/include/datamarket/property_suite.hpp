#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datamarket/types.hpp"

namespace datamarket {

struct PropertyResult {
  std::string name;
  int trials = 0;
  bool passed = false;
  std::string counterexample;  // minimal dump of the first failing instance
};

struct PropertyReport {
  std::vector<PropertyResult> suites;
  bool all_passed() const;
  std::string to_text() const;  // one line per suite
};

/// Runs every randomized invariant suite with a fixed seed; deterministic
/// given (seed, trials). Exhaustive sub-checks stay at K <= 6.
PropertyReport run_property_suite(std::uint64_t seed, int trials,
                                  const SolverSettings& settings = {});

namespace detail {
/// Exposed for the suite's own sensitivity test: with `flipped` the
/// submodularity comparison is inverted and the check must fail.
PropertyResult submodularity_in_actions_check(std::uint64_t seed, int trials,
                                              bool flipped);
}  // namespace detail

}  // namespace datamarket
