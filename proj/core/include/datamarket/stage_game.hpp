#pragma once

#include <vector>

#include "datamarket/info_kernel.hpp"
#include "datamarket/market.hpp"
#include "datamarket/types.hpp"

namespace datamarket {

/// Entry, sharing and buyer-acceptance profiles. Sharing is only effective
/// for entrants and acceptance only for effective shares; normalized() applies
/// a &= e and b &= a & e rather than rejecting.
struct ActionProfiles {
  PlatformSet entry = 0;
  PlatformSet sharing = 0;
  PlatformSet buyer = 0;

  ActionProfiles normalized() const {
    ActionProfiles n{entry, sharing & entry, 0};
    n.buyer = buyer & n.sharing;
    return n;
  }
};

struct PriceVector {
  std::vector<double> p;  // p_i = 0 whenever platform i has nothing to sell
};

/// Outcome of the last three stages at a fixed (sigma, e, a, p, b).
struct StageOutcome {
  PriceVector prices;
  PlatformSet buyer = 0;
  double u_user = 0.0;
  std::vector<double> u_platforms;
  double u_buyer = 0.0;
  double info_to_buyer = 0.0;
};

/// Unique equilibrium prices: each active platform charges beta times the
/// buyer's marginal (shaped) information gain from its signal; the buyer then
/// accepts every offer.
PriceVector equilibrium_prices(const MarketParams& params,
                               const NoiseProfile& noise, PlatformSet entry,
                               PlatformSet sharing);

StageOutcome stage_utilities(const MarketParams& params,
                             const NoiseProfile& noise, PlatformSet entry,
                             PlatformSet sharing, const PriceVector& prices,
                             PlatformSet buyer);

/// The user's payoff from sharing profile `a` given entry `e`, with
/// equilibrium pricing and full buyer acceptance downstream.
double user_utility(const MarketParams& params, const NoiseProfile& noise,
                    PlatformSet entry, PlatformSet sharing);

/// Lattice-maximal element of the user's argmax set over sharing profiles,
/// restricted to entrants. Profiles within tie_tol of the maximum count as
/// tied and ties resolve toward more sharing.
///
/// Throws SearchLimitExceeded when the entrant count exceeds the exhaustive
/// search cap.
PlatformSet user_best_response(const MarketParams& params,
                               const NoiseProfile& noise, PlatformSet entry,
                               const SolverSettings& settings = {});

/// Region label of (sigma, e): the sharing profile a with sigma in Sigma_{a,e}.
PlatformSet region_of(const MarketParams& params, const NoiseProfile& noise,
                      PlatformSet entry, const SolverSettings& settings = {});

/// Utilitarian welfare; payments cancel between platforms and buyer.
double welfare(const StageOutcome& outcome, const MarketParams& params);

struct PrivacyAssumptionReport {
  bool holds = false;
  PlatformSet violating_entry = 0;  // meaningful when !holds
  double margin = 0.0;              // user utility of the violating profile
  // K = 2 cross-check of the closed-form alpha threshold for the pair region
  // (identity user shape only).
  bool closed_form_checked = false;
  double closed_form_threshold = 0.0;
  bool closed_form_consistent = true;
};

/// Checks that zero noise deters all sharing: for every entry set, the
/// all-zeros profile is the user's best response at sigma = 0.
PrivacyAssumptionReport check_privacy_assumption(
    const MarketParams& params, const SolverSettings& settings = {});

}  // namespace datamarket
