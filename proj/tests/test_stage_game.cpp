#include <doctest.h>

#include <cmath>

#include "datamarket/equilibrium.hpp"
#include "datamarket/stage_game.hpp"

using namespace datamarket;

namespace {

MarketParams make(std::vector<double> gamma, double alpha, double beta,
                  std::vector<double> cost) {
  MarketParams p;
  p.K = static_cast<int>(gamma.size());
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = std::move(gamma);
  p.cost = std::move(cost);
  return p;
}

}  // namespace

TEST_CASE("equilibrium prices") {
  SUBCASE("single platform at zero noise") {
    const MarketParams p = make({1.0}, 2.0, 0.5, {0.0});
    const auto prices =
        equilibrium_prices(p, NoiseProfile{{0.0}}, full_set(1), full_set(1));
    CHECK(prices.p[0] == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("two symmetric platforms") {
    const MarketParams p = make({1.0, 1.0}, 2.0, 3.0, {0.0, 0.0});
    const auto prices =
        equilibrium_prices(p, NoiseProfile{{1.0, 1.0}}, full_set(2),
                           full_set(2));
    CHECK(prices.p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(prices.p[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("inactive platforms price at zero") {
    const MarketParams p = make({1.0, 1.0}, 2.0, 3.0, {0.0, 0.0});
    const auto prices = equilibrium_prices(p, NoiseProfile{{1.0, 1.0}},
                                           full_set(2), platform_bit(0));
    CHECK(prices.p[1] == 0.0);
    const auto none = equilibrium_prices(p, NoiseProfile{{1.0, 1.0}},
                                         platform_bit(1), platform_bit(0));
    CHECK(none.p[0] == 0.0);
    CHECK(none.p[1] == 0.0);
  }
}

TEST_CASE("stage utilities") {
  SUBCASE("symmetric boundary point has zero user utility") {
    const MarketParams p = make({1.0, 1.0}, 2.0, 3.0, {0.0, 0.0});
    const NoiseProfile noise{{1.0, 1.0}};
    const auto prices =
        equilibrium_prices(p, noise, full_set(2), full_set(2));
    const auto out = stage_utilities(p, noise, full_set(2), full_set(2),
                                     prices, full_set(2));
    CHECK(out.u_user == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.info_to_buyer == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("empty market") {
    const MarketParams p = make({1.0, 1.0}, 2.0, 3.0, {0.3, 0.3});
    const auto out = stage_utilities(p, NoiseProfile{{1.0, 1.0}}, 0,
                                     full_set(2), PriceVector{}, full_set(2));
    CHECK(out.u_user == 0.0);
    CHECK(out.u_platforms[0] == 0.0);
    CHECK(out.u_platforms[1] == 0.0);
    CHECK(out.u_buyer == 0.0);
    CHECK(welfare(out, p) == 0.0);
  }
  SUBCASE("single platform at the indifference noise") {
    const MarketParams p = make({1.0}, 2.0, 1.0, {0.4});
    const NoiseProfile noise{{std::sqrt(2.0)}};
    const auto prices =
        equilibrium_prices(p, noise, full_set(1), full_set(1));
    const auto out = stage_utilities(p, noise, full_set(1), full_set(1),
                                     prices, full_set(1));
    CHECK(out.u_platforms[0] == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(out.u_user == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.u_buyer == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("user best response") {
  SUBCASE("boundary tie resolves toward full sharing") {
    const MarketParams p = make({1.0, 1.0}, 2.0, 3.0, {0.0, 0.0});
    CHECK(user_best_response(p, NoiseProfile{{1.0, 1.0}}, full_set(2)) ==
          full_set(2));
  }
  SUBCASE("silent platforms get all the entrants' shares") {
    const MarketParams p =
        make({1.0, 0.6, 0.9}, 5.0, 1.0, {0.0, 0.0, 0.0});
    const PlatformSet entry = platform_bit(0) | platform_bit(2);
    CHECK(user_best_response(p, NoiseProfile::silent(3), entry) == entry);
  }
  SUBCASE("zero noise deters all sharing under the privacy assumption") {
    const MarketParams p = make({0.8, 0.7}, 3.0, 1.0, {0.0, 0.0});
    CHECK(user_best_response(p, NoiseProfile::zeros(2), full_set(2)) == 0);
  }
  SUBCASE("exhaustive cap is enforced") {
    const MarketParams p = make({1.0, 1.0, 1.0}, 2.0, 1.0, {0.0, 0.0, 0.0});
    SolverSettings tight;
    tight.exhaustive_limit = 2;
    CHECK_THROWS_AS(
        user_best_response(p, NoiseProfile::zeros(3), full_set(3), tight),
        SearchLimitExceeded);
  }
}

TEST_CASE("region labels") {
  const MarketParams p = make({0.8, 0.7}, 2.5, 1.0, {0.0, 0.0});
  SUBCASE("origin sits in the no-sharing region") {
    CHECK(region_of(p, NoiseProfile::zeros(2), full_set(2)) == 0);
  }
  SUBCASE("far corner shares with everyone") {
    CHECK(region_of(p, NoiseProfile{{30.0, 30.0}}, full_set(2)) ==
          full_set(2));
  }
  SUBCASE("crossing the region border flips the label") {
    // Hold platform 1 well past its solo-sharing boundary and push sigma2
    // across the border between sharing with both and with platform 1 only.
    const double sigma1 = std::sqrt(30.0);
    auto label_at = [&](double sigma2_sq) {
      return region_of(p, NoiseProfile{{sigma1, std::sqrt(sigma2_sq)}},
                       full_set(2));
    };
    REQUIRE(label_at(0.0) == platform_bit(0));
    REQUIRE(label_at(20.0) == full_set(2));
    double lo = 0.0, hi = 20.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (label_at(mid) == platform_bit(0))
        lo = mid;
      else
        hi = mid;
    }
    CHECK(label_at(lo) == platform_bit(0));
    CHECK(label_at(hi) == full_set(2));
    CHECK(hi - lo < 1e-9);
  }
}

TEST_CASE("welfare") {
  SUBCASE("all-enter equilibrium matches the closed form") {
    MarketParams p = make({1.0, 1.0, 1.0}, 4.0, 6.0, {0.3, 0.75, 1.0});
    const EquilibriumResult res = solve(p);
    REQUIRE(res.status == SolveStatus::verified);
    REQUIRE(res.entry == full_set(3));
    CHECK(welfare(res.outcome, p) ==
          doctest::Approx(3.0 * (0.5 + 6.0 / 8.0) - 2.05).epsilon(1e-9));
    // Oracle: sum the four utilities directly.
    double direct = res.outcome.u_user + res.outcome.u_buyer;
    for (const double u : res.outcome.u_platforms) direct += u;
    CHECK(welfare(res.outcome, p) == direct);
  }
  SUBCASE("low-beta regime matches the low-cost-only closed form") {
    MarketParams p = make({1.0, 1.0, 1.0}, 4.0, 1.0, {0.3, 0.75, 1.0});
    const EquilibriumResult res = solve(p);
    REQUIRE(res.status == SolveStatus::verified);
    REQUIRE(res.entry == platform_bit(0));
    CHECK(welfare(res.outcome, p) ==
          doctest::Approx(1.0 * (0.5 + 1.0 / 8.0) - 0.3).epsilon(1e-9));
  }
}

TEST_CASE("minimum-privacy assumption check") {
  SUBCASE("asymmetric correlations against the closed-form threshold") {
    const double threshold = (4.0 - 0.3136) / (2.0 * (0.64 + 0.49 - 0.3136));
    CHECK(threshold == doctest::Approx(2.2577).epsilon(1e-4));

    MarketParams pass = make({0.8, 0.7}, 3.0, 1.0, {0.0, 0.0});
    const auto ok = check_privacy_assumption(pass);
    CHECK(ok.holds);
    CHECK(ok.closed_form_checked);
    CHECK(ok.closed_form_threshold == doctest::Approx(threshold));
    CHECK(ok.closed_form_consistent);

    MarketParams fail = make({0.8, 0.7}, 2.0, 1.0, {0.0, 0.0});
    const auto bad = check_privacy_assumption(fail);
    CHECK_FALSE(bad.holds);
    // At alpha = 2 the single-platform condition for platform 1 binds first.
    CHECK(bad.violating_entry == platform_bit(1));
    CHECK(bad.closed_form_consistent);
  }
  SUBCASE("unit correlations pass just above 3/2") {
    MarketParams p = make({1.0, 1.0}, 1.6, 1.0, {0.0, 0.0});
    CHECK(check_privacy_assumption(p).holds);
    p.alpha = 1.45;
    CHECK_FALSE(check_privacy_assumption(p).holds);
  }
  SUBCASE("large alpha always passes") {
    MarketParams p = make({0.9, 0.5, 0.7}, 1000.0, 1.0, {0.0, 0.0, 0.0});
    CHECK(check_privacy_assumption(p).holds);
  }
}
