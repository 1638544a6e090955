#include <doctest.h>

#include "datamarket/property_suite.hpp"

using namespace datamarket;

TEST_CASE("randomized suites pass on a correct build") {
  const PropertyReport report = run_property_suite(7, 250);
  for (const auto& suite : report.suites) {
    INFO(suite.name, ": ", suite.counterexample);
    CHECK(suite.passed);
  }
  CHECK(report.all_passed());
}

TEST_CASE("a sign-flipped submodularity check fails with a counterexample") {
  const PropertyResult flipped =
      detail::submodularity_in_actions_check(7, 2000, true);
  CHECK_FALSE(flipped.passed);
  CHECK_FALSE(flipped.counterexample.empty());
  // The honest direction passes on the same stream.
  CHECK(detail::submodularity_in_actions_check(7, 2000, false).passed);
}

TEST_CASE("reports are deterministic given the seed") {
  const PropertyReport a = run_property_suite(11, 100);
  const PropertyReport b = run_property_suite(11, 100);
  CHECK(a.to_text() == b.to_text());
}

TEST_CASE("trial counts are validated") {
  CHECK_THROWS_AS(run_property_suite(1, 0), InvalidParams);
}
