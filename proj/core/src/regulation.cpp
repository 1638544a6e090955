#include "datamarket/regulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace datamarket {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(RegulationPolicy::Kind k) {
  switch (k) {
    case RegulationPolicy::Kind::none:
      return "none";
    case RegulationPolicy::Kind::uniform:
      return "uniform";
    case RegulationPolicy::Kind::ban_all:
      return "ban_all";
    case RegulationPolicy::Kind::nonuniform:
      return "nonuniform";
  }
  return "unknown";
}

RegulationPolicy RegulationPolicy::none(int k) {
  return {Kind::none, std::vector<double>(static_cast<std::size_t>(k), 0.0)};
}

RegulationPolicy RegulationPolicy::uniform(int k, double sigma_bar) {
  return {Kind::uniform,
          std::vector<double>(static_cast<std::size_t>(k), sigma_bar)};
}

RegulationPolicy RegulationPolicy::ban_all(int k) {
  return {Kind::ban_all,
          std::vector<double>(static_cast<std::size_t>(k), kInfiniteNoise)};
}

RegulationPolicy RegulationPolicy::nonuniform(std::vector<double> bounds) {
  return {Kind::nonuniform, std::move(bounds)};
}

void RegulationPolicy::validate(int k) const {
  if (sigma_lower.size() != static_cast<std::size_t>(k))
    throw InvalidParams("policy bounds must have exactly K entries");
  for (int i = 0; i < k; ++i) {
    const double b = sigma_lower[static_cast<std::size_t>(i)];
    if (std::isnan(b) || b < 0.0)
      throw InvalidParams("policy bounds must be >= 0 or infinite");
  }
  if (kind == Kind::uniform) {
    for (const double b : sigma_lower)
      if (!std::isfinite(b) || b != sigma_lower.front())
        throw InvalidParams("uniform policy needs equal finite bounds");
  }
  if (kind == Kind::ban_all) {
    for (const double b : sigma_lower)
      if (std::isfinite(b))
        throw InvalidParams("ban_all policy needs infinite bounds everywhere");
  }
}

PlatformSet RegulationPolicy::banned(int k) const {
  if (kind == Kind::none) return 0;
  PlatformSet s = 0;
  for (int i = 0; i < k; ++i)
    if (!std::isfinite(sigma_lower[static_cast<std::size_t>(i)]))
      s |= platform_bit(i);
  return s;
}

namespace {

bool respects_policy(const EquilibriumResult& res, const MarketParams& params,
                     const RegulationPolicy& policy, double tol) {
  for (int i = 0; i < params.K; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const bool sells = contains(res.sharing & res.entry, i) &&
                       std::isfinite(res.noise.sigma[idx]);
    const double bound = policy.sigma_lower[idx];
    if (!std::isfinite(bound)) {
      if (sells) return false;
    } else if (sells && res.noise.sigma[idx] < bound - tol) {
      return false;
    }
  }
  return true;
}

EquilibriumResult assemble_policy_result(const MarketParams& params,
                                         const NoiseProfile& noise,
                                         PlatformSet entry,
                                         const std::vector<double>& lb,
                                         PlatformSet banned,
                                         const SolverSettings& settings) {
  EquilibriumResult res;
  res.noise = noise;
  res.entry = entry;
  res.certificate =
      verify_equilibrium(params, noise, entry, settings, &lb, banned);
  res.sharing = user_best_response(params, noise, entry, settings);
  res.prices = equilibrium_prices(params, noise, entry, res.sharing);
  res.outcome = stage_utilities(params, noise, entry, res.sharing, res.prices,
                                full_set(params.K));
  res.buyer = res.outcome.buyer;
  if (res.certificate.verified(settings.gain_tol)) {
    res.status = SolveStatus::verified;
  } else if (res.certificate.user_br_ok && res.certificate.boundary_ok) {
    res.status = SolveStatus::no_equilibrium_found;
  } else {
    res.status = SolveStatus::candidate_only;
  }
  return res;
}

}  // namespace

EquilibriumResult solve_with_policy(const MarketParams& params,
                                    const RegulationPolicy& policy,
                                    const SolverSettings& settings) {
  params.validate();
  if (policy.is_none()) return solve(params, settings);
  policy.validate(params.K);

  {
    const EquilibriumResult unconstrained = solve(params, settings);
    if (unconstrained.status == SolveStatus::verified &&
        respects_policy(unconstrained, params, policy, settings.lin_tol))
      return unconstrained;
  }

  const PlatformSet banned = policy.banned(params.K);
  std::vector<double> lb(static_cast<std::size_t>(params.K), 0.0);
  for (int i = 0; i < params.K; ++i) {
    const double b = policy.sigma_lower[static_cast<std::size_t>(i)];
    lb[static_cast<std::size_t>(i)] = std::isfinite(b) ? b : 0.0;
  }

  PlatformSet banned_entrants = 0;
  for (int i = 0; i < params.K; ++i)
    if (contains(banned, i) && params.low_cost(i)) banned_entrants |= platform_bit(i);

  PlatformSet sellers = full_set(params.K) & ~banned;
  NoiseProfile profile = NoiseProfile::silent(params.K);
  for (int round = 0; round <= params.K + 1; ++round) {
    const PlatformSet entry = banned_entrants | sellers;
    if (sellers == 0) {
      profile = NoiseProfile::silent(params.K);
      break;
    }
    auto built = boundary_noise_profile(params, sellers, lb);
    if (!built) {
      // The bounds alone leak too much for the user to share with everyone;
      // drop the seller with the largest pinned leak and retry.
      int worst = -1;
      double worst_t = -1.0;
      for (const int i : set_members(sellers, params.K)) {
        const double t = noise_to_ratio(params.gamma[static_cast<std::size_t>(i)],
                                        lb[static_cast<std::size_t>(i)]);
        if (t > worst_t) {
          worst_t = t;
          worst = i;
        }
      }
      sellers &= ~platform_bit(worst);
      continue;
    }
    profile = *built;

    const PlatformSet br = user_best_response(params, profile, entry, settings);
    if ((br & sellers) != sellers) {
      // A seller the user refuses cannot recover here: its noise is already
      // at the boundary construction's level, so treat it as priced out.
      PlatformSet dropped = sellers & ~br;
      sellers &= ~platform_bit(set_members(dropped, params.K).front());
      continue;
    }

    const PriceVector p = equilibrium_prices(params, profile, entry, br);
    const StageOutcome out =
        stage_utilities(params, profile, entry, br, p, full_set(params.K));
    int worst = -1;
    double worst_u = -settings.gain_tol;
    for (const int i : set_members(sellers, params.K)) {
      const double u = out.u_platforms[static_cast<std::size_t>(i)];
      if (u < worst_u) {
        worst_u = u;
        worst = i;
      }
    }
    if (worst >= 0) {
      sellers &= ~platform_bit(worst);
      continue;
    }
    break;
  }

  const PlatformSet entry = banned_entrants | sellers;
  return assemble_policy_result(params, profile, entry, lb, banned, settings);
}

double mandate_entry_threshold(const MarketParams& params, double sigma_bar,
                               const SolverSettings& settings) {
  params.validate();
  if (!(std::isfinite(sigma_bar) && sigma_bar >= 0.0))
    throw InvalidParams("sigma_bar must be finite and >= 0");
  const Thresholds th = beta_thresholds(params, settings);

  const NoiseProfile mandated = NoiseProfile::uniform(params.K, sigma_bar);
  const PlatformSet all = full_set(params.K);
  double threshold = th.beta_bar;
  for (int i = 0; i < params.K; ++i) {
    if (params.low_cost(i)) continue;
    const double need = params.cost[static_cast<std::size_t>(i)] - 0.5;
    const double h_full =
        params.h_buyer(revealed_info(params, mandated, all));
    const double h_rest = params.h_buyer(
        revealed_info(params, mandated, all & ~platform_bit(i)));
    const double marginal = h_full - h_rest;
    if (!(marginal > 0.0) ||
        need / marginal > settings.mandate_beta_cap)
      throw DegenerateMandate(
          "mandated marginal information underflows the threshold cap");
    threshold = std::max(threshold, need / marginal);
  }
  return threshold;
}

namespace {

PolicyEvaluation evaluate(const MarketParams& params,
                          const RegulationPolicy& policy,
                          const SolverSettings& settings) {
  PolicyEvaluation ev;
  ev.policy = policy;
  ev.result = solve_with_policy(params, policy, settings);
  ev.user_utility = ev.result.outcome.u_user;
  ev.welfare_value = welfare(ev.result.outcome, params);
  return ev;
}

int count_low_cost(const MarketParams& params) {
  int n = 0;
  for (int i = 0; i < params.K; ++i)
    if (params.low_cost(i)) ++n;
  return n;
}

}  // namespace

PolicyComparison compare_ban_vs_uniform(const MarketParams& params,
                                        std::span<const double> sigma_bar_grid,
                                        const SolverSettings& settings) {
  params.validate();
  PolicyComparison cmp;
  cmp.evaluations.push_back(
      evaluate(params, RegulationPolicy::ban_all(params.K), settings));
  for (const double sb : sigma_bar_grid)
    cmp.evaluations.push_back(
        evaluate(params, RegulationPolicy::uniform(params.K, sb), settings));

  cmp.best_index = 0;
  for (std::size_t i = 1; i < cmp.evaluations.size(); ++i)
    if (cmp.evaluations[i].user_utility >
        cmp.evaluations[static_cast<std::size_t>(cmp.best_index)].user_utility)
      cmp.best_index = static_cast<int>(i);

  const int low = count_low_cost(params);
  if (low == params.K) {
    cmp.predicted_winner = "ban_all";
  } else {
    cmp.predicted_winner = "ban_all";
    try {
      const Thresholds th = beta_thresholds(params, settings);
      if (params.beta > th.beta_under) {
        for (const double sb : sigma_bar_grid) {
          try {
            if (params.beta < mandate_entry_threshold(params, sb, settings))
              continue;
          } catch (const DegenerateMandate&) {
            continue;
          }
          const double service_edge =
              0.5 * (params.K - low) -
              params.alpha *
                  params.h_user(revealed_info(
                      params, NoiseProfile::uniform(params.K, sb),
                      full_set(params.K)));
          if (service_edge > 0.0) {
            cmp.predicted_winner = "uniform";
            break;
          }
        }
      }
    } catch (const AssumptionViolated&) {
      cmp.note = "privacy assumption fails; no theoretical prediction";
      cmp.predicted_winner = "";
    }
  }
  cmp.prediction_matches =
      !cmp.predicted_winner.empty() &&
      cmp.predicted_winner ==
          to_string(cmp.evaluations[static_cast<std::size_t>(cmp.best_index)]
                        .policy.kind);
  return cmp;
}

PolicyComparison optimal_nonuniform(const MarketParams& params,
                                    std::span<const double> sigma_bar_grid,
                                    const SolverSettings& settings) {
  params.validate();
  PolicyComparison cmp;
  const int low = count_low_cost(params);
  if (low == params.K) {
    cmp.evaluations.push_back(
        evaluate(params, RegulationPolicy::ban_all(params.K), settings));
    cmp.best_index = 0;
    cmp.predicted_winner = "ban_all";
    cmp.prediction_matches = true;
    cmp.note = "no high-cost platform; banning data sharing is optimal";
    return cmp;
  }

  auto nonuniform_for = [&](double sb) {
    std::vector<double> bounds(static_cast<std::size_t>(params.K), sb);
    for (int i = 0; i < params.K; ++i)
      if (params.low_cost(i))
        bounds[static_cast<std::size_t>(i)] = kInfiniteNoise;
    return RegulationPolicy::nonuniform(std::move(bounds));
  };

  cmp.evaluations.push_back(
      evaluate(params, RegulationPolicy::ban_all(params.K), settings));
  for (const double sb : sigma_bar_grid)
    cmp.evaluations.push_back(
        evaluate(params, RegulationPolicy::uniform(params.K, sb), settings));
  for (const double sb : sigma_bar_grid)
    cmp.evaluations.push_back(evaluate(params, nonuniform_for(sb), settings));

  cmp.best_index = 0;
  for (std::size_t i = 1; i < cmp.evaluations.size(); ++i)
    if (cmp.evaluations[i].user_utility >
        cmp.evaluations[static_cast<std::size_t>(cmp.best_index)].user_utility)
      cmp.best_index = static_cast<int>(i);

  // Entry threshold backing the comparison at the best nonuniform point:
  // both the uniform and the high-cost-only mandates must support full entry.
  const auto n_grid = sigma_bar_grid.size();
  std::size_t best_nonuni = 0;
  double best_nonuni_u = -kInf;
  for (std::size_t k = 0; k < n_grid; ++k) {
    const auto idx = 1 + n_grid + k;
    if (cmp.evaluations[idx].user_utility > best_nonuni_u) {
      best_nonuni_u = cmp.evaluations[idx].user_utility;
      best_nonuni = k;
    }
  }
  if (n_grid > 0) {
    const double sb = sigma_bar_grid[best_nonuni];
    double beta_hat = 0.0;
    try {
      beta_hat = mandate_entry_threshold(params, sb, settings);
    } catch (const Error&) {
      beta_hat = kInf;
    }
    // High-cost platforms selling alone have weakly larger marginals, so the
    // uniform threshold already covers the nonuniform mandate; keep the
    // explicit maximum anyway.
    PlatformSet high = 0;
    for (int i = 0; i < params.K; ++i)
      if (!params.low_cost(i)) high |= platform_bit(i);
    const NoiseProfile mandated = NoiseProfile::uniform(params.K, sb);
    for (const int i : set_members(high, params.K)) {
      const double marg =
          params.h_buyer(revealed_info(params, mandated, high)) -
          params.h_buyer(
              revealed_info(params, mandated, high & ~platform_bit(i)));
      const double need = params.cost[static_cast<std::size_t>(i)] - 0.5;
      if (marg > 0.0) beta_hat = std::max(beta_hat, need / marg);
    }
    cmp.beta_hat = beta_hat;
  }
  cmp.predicted_winner = "nonuniform";
  cmp.prediction_matches =
      params.beta >= cmp.beta_hat &&
      cmp.evaluations[static_cast<std::size_t>(cmp.best_index)].policy.kind ==
          RegulationPolicy::Kind::nonuniform;
  return cmp;
}

std::vector<double> default_sigma_bar_grid(const SolverSettings& settings) {
  std::vector<double> grid;
  const int n = settings.policy_grid_points;
  grid.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double frac =
        n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    const double sigma_sq =
        settings.policy_grid_lo *
        std::pow(settings.policy_grid_hi / settings.policy_grid_lo, frac);
    grid.push_back(std::sqrt(sigma_sq));
  }
  return grid;
}

}  // namespace datamarket
