#include "datamarket/stage_game.hpp"

#include <cmath>

namespace datamarket {

PriceVector equilibrium_prices(const MarketParams& params,
                               const NoiseProfile& noise, PlatformSet entry,
                               PlatformSet sharing) {
  const PlatformSet active = sharing & entry;
  PriceVector out;
  out.p.assign(static_cast<std::size_t>(params.K), 0.0);
  if (active == 0) return out;
  const double h_full =
      params.h_buyer(revealed_info(params, noise, active));
  for (int i = 0; i < params.K; ++i) {
    if (!contains(active, i)) continue;
    const double h_rest =
        params.h_buyer(revealed_info(params, noise, active & ~platform_bit(i)));
    out.p[static_cast<std::size_t>(i)] = params.beta * (h_full - h_rest);
  }
  return out;
}

StageOutcome stage_utilities(const MarketParams& params,
                             const NoiseProfile& noise, PlatformSet entry,
                             PlatformSet sharing, const PriceVector& prices,
                             PlatformSet buyer) {
  const ActionProfiles acts =
      ActionProfiles{entry, sharing, buyer}.normalized();
  StageOutcome out;
  out.prices = prices;
  out.prices.p.resize(static_cast<std::size_t>(params.K), 0.0);
  out.buyer = acts.buyer;
  out.info_to_buyer = revealed_info(params, noise, acts.buyer);

  out.u_user = 0.5 * set_size(acts.sharing) -
               params.alpha * params.h_user(out.info_to_buyer);

  out.u_platforms.assign(static_cast<std::size_t>(params.K), 0.0);
  double payments = 0.0;
  for (int i = 0; i < params.K; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!contains(acts.entry, i)) continue;  // exact zero for non-entrants
    double u = -params.cost[idx];
    if (contains(acts.sharing, i)) u += platform_service_info();
    if (contains(acts.buyer, i)) {
      u += out.prices.p[idx];
      payments += out.prices.p[idx];
    }
    out.u_platforms[idx] = u;
  }
  out.u_buyer = params.beta * params.h_buyer(out.info_to_buyer) - payments;
  return out;
}

double user_utility(const MarketParams& params, const NoiseProfile& noise,
                    PlatformSet entry, PlatformSet sharing) {
  const PlatformSet a = sharing & entry;
  return 0.5 * set_size(a) -
         params.alpha * params.h_user(revealed_info(params, noise, a));
}

PlatformSet user_best_response(const MarketParams& params,
                               const NoiseProfile& noise, PlatformSet entry,
                               const SolverSettings& settings) {
  const int n = set_size(entry);
  if (n > settings.exhaustive_limit)
    throw SearchLimitExceeded("entrant count exceeds the exhaustive-search cap");
  const auto entrants = set_members(entry, params.K);

  double best = 0.0;  // empty profile
  std::vector<std::pair<PlatformSet, double>> values;
  values.reserve(std::size_t{1} << n);
  values.emplace_back(0, 0.0);
  for (PlatformSet sub = 1; sub < (PlatformSet{1} << n); ++sub) {
    PlatformSet a = 0;
    for (int b = 0; b < n; ++b) {
      if (contains(sub, b)) a |= platform_bit(entrants[static_cast<std::size_t>(b)]);
    }
    const double u = user_utility(params, noise, entry, a);
    values.emplace_back(a, u);
    if (u > best) best = u;
  }

  // Ties within tolerance resolve toward the lattice-maximal profile; the
  // argmax set is join-closed, so its join attains the maximum again.
  PlatformSet join = 0;
  for (const auto& [a, u] : values) {
    if (u >= best - settings.tie_tol) join |= a;
  }
  if (user_utility(params, noise, entry, join) >= best - settings.tie_tol)
    return join;
  PlatformSet fallback = 0;
  for (const auto& [a, u] : values) {
    if (u < best - settings.tie_tol) continue;
    if (set_size(a) > set_size(fallback) ||
        (set_size(a) == set_size(fallback) && a > fallback))
      fallback = a;
  }
  return fallback;
}

PlatformSet region_of(const MarketParams& params, const NoiseProfile& noise,
                      PlatformSet entry, const SolverSettings& settings) {
  return user_best_response(params, noise, entry, settings);
}

double welfare(const StageOutcome& outcome, const MarketParams& params) {
  double w = outcome.u_user + outcome.u_buyer;
  for (int i = 0; i < params.K; ++i)
    w += outcome.u_platforms[static_cast<std::size_t>(i)];
  return w;
}

PrivacyAssumptionReport check_privacy_assumption(
    const MarketParams& params, const SolverSettings& settings) {
  params.validate();
  if (params.K > settings.exhaustive_limit)
    throw SearchLimitExceeded("K exceeds the exhaustive-search cap");
  const NoiseProfile zero = NoiseProfile::zeros(params.K);

  PrivacyAssumptionReport report;
  report.holds = true;

  // The zero-noise profile sits in Sigma_{0,e} for every entry set exactly
  // when no nonempty sharing profile is weakly preferred to silence; the
  // constraint set for smaller entry sets is a subset of the one for e = all.
  for (PlatformSet a = 1; a <= full_set(params.K); ++a) {
    const double u = user_utility(params, zero, a, a);
    if (u >= -settings.tie_tol) {
      report.holds = false;
      report.violating_entry = a;
      report.margin = u;
      break;
    }
  }

  if (params.K == 2 && params.h_user.is_identity()) {
    const double g1 = params.gamma[0] * params.gamma[0];
    const double g2 = params.gamma[1] * params.gamma[1];
    const double denom = 2.0 * (g1 + g2 - g1 * g2);
    report.closed_form_checked = denom > 0.0;
    if (report.closed_form_checked) {
      report.closed_form_threshold = (4.0 - g1 * g2) / denom;
      const double pair_u =
          user_utility(params, zero, full_set(2), full_set(2));
      const bool pair_deterred = pair_u < -settings.tie_tol;
      report.closed_form_consistent =
          pair_deterred == (params.alpha > report.closed_form_threshold);
    }
  }
  return report;
}

}  // namespace datamarket
