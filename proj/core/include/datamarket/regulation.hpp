#pragma once

#include <span>
#include <string>
#include <vector>

#include "datamarket/equilibrium.hpp"

namespace datamarket {

/// Minimum privacy mandate: per-platform lower bounds on the noise level.
/// An infinite bound bans the platform from selling data altogether.
struct RegulationPolicy {
  enum class Kind { none, uniform, ban_all, nonuniform };

  Kind kind = Kind::none;
  std::vector<double> sigma_lower;  // length K; kInfiniteNoise = ban

  static RegulationPolicy none(int k);
  static RegulationPolicy uniform(int k, double sigma_bar);
  static RegulationPolicy ban_all(int k);
  static RegulationPolicy nonuniform(std::vector<double> bounds);

  void validate(int k) const;
  PlatformSet banned(int k) const;
  bool is_none() const { return kind == Kind::none; }
};

const char* to_string(RegulationPolicy::Kind k);

struct PolicyEvaluation {
  RegulationPolicy policy;
  EquilibriumResult result;
  double user_utility = 0.0;
  double welfare_value = 0.0;
};

struct PolicyComparison {
  std::vector<PolicyEvaluation> evaluations;
  int best_index = -1;            // argmax of user utility
  std::string predicted_winner;   // what the theory predicts for this instance
  bool prediction_matches = false;
  double beta_hat = 0.0;          // entry threshold backing the prediction, if any
  std::string note;
};

/// Solves the game with platform noise constrained to sigma_i >= bound_i.
/// Banned platforms sell nothing (price zero) and enter exactly when the
/// service gain covers their cost. When the unconstrained equilibrium already
/// satisfies the bounds it is returned unchanged; otherwise binding platforms
/// are pinned at their bound and the rest re-solve to the user's boundary.
EquilibriumResult solve_with_policy(const MarketParams& params,
                                    const RegulationPolicy& policy,
                                    const SolverSettings& settings = {});

/// Smallest beta making every platform willing to enter under the uniform
/// mandate sigma_bar, floored at the unregulated all-enter threshold.
/// Throws DegenerateMandate when a marginal is so small that the threshold
/// exceeds the configured cap.
double mandate_entry_threshold(const MarketParams& params, double sigma_bar,
                               const SolverSettings& settings = {});

/// User utility under a full ban versus uniform mandates on a grid of
/// sigma_bar values, with the theory's predicted winner alongside.
PolicyComparison compare_ban_vs_uniform(const MarketParams& params,
                                        std::span<const double> sigma_bar_grid,
                                        const SolverSettings& settings = {});

/// Ban for low-cost platforms combined with a uniform mandate for high-cost
/// ones, compared against the best uniform mandate and the full ban on the
/// same grid.
PolicyComparison optimal_nonuniform(const MarketParams& params,
                                    std::span<const double> sigma_bar_grid,
                                    const SolverSettings& settings = {});

/// sqrt of policy_grid_points log-spaced sigma^2 values in
/// [policy_grid_lo, policy_grid_hi].
std::vector<double> default_sigma_bar_grid(const SolverSettings& settings = {});

}  // namespace datamarket
