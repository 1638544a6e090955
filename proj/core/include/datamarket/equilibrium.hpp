#pragma once

#include <optional>
#include <vector>

#include "datamarket/stage_game.hpp"

namespace datamarket {

enum class SolveStatus { verified, candidate_only, no_equilibrium_found };

const char* to_string(SolveStatus s);

/// One upward-noise deviation probe: the deviator raised its noise until the
/// user's best response shrank to `target_count` sharers.
struct DeviationRecord {
  int platform = -1;
  int target_count = 0;
  double gain = 0.0;     // utility change for the deviator; <= tol at equilibrium
  double t_prime = 0.0;  // leak ratio at which the gain was attained
};

/// Entry (entering = true, at the deviator's best feasible noise) or exit
/// (entering = false) probe.
struct EntryRecord {
  int platform = -1;
  bool entering = false;
  double gain = 0.0;
  double sigma = 0.0;  // entry noise used; ignored for exits
};

struct VerificationCertificate {
  bool user_br_ok = false;
  bool boundary_ok = false;
  std::vector<DeviationRecord> noise_deviations;
  std::vector<EntryRecord> entry_deviations;

  double worst_gain() const;
  bool verified(double gain_tol) const;
};

struct EquilibriumResult {
  NoiseProfile noise;
  PlatformSet entry = 0;
  PlatformSet sharing = 0;
  PlatformSet buyer = 0;
  PriceVector prices;
  StageOutcome outcome;
  VerificationCertificate certificate;
  SolveStatus status = SolveStatus::no_equilibrium_found;
};

/// Per-platform entry thresholds in ascending-cost order. Platforms with
/// equal cost share the threshold of the last group member and enter
/// together.
struct EntryThresholds {
  std::vector<int> cost_order;           // platform ids sorted by cost
  int low_cost_count = 0;                // number of platforms with c <= 1/2
  std::vector<double> beta;              // threshold per sorted position (0 for low-cost)
  std::vector<double> beta_lower_bound;  // universal bound 2 alpha (c - 1/2), floored at 0
};

struct Thresholds {
  double alpha_bar = 0.0;        // reported threshold: bisection root for K = 2,
                                 // (K+1)^2/8 otherwise
  double alpha_bar_sharp = 0.0;  // numeric threshold from exact deviation analysis
  double beta_bar = 0.0;         // all-enter sufficiency at the symmetric candidate
  double beta_bar_refined = 0.0; // hedge from the local t' refinement scan (>= beta_bar)
  double beta_under = 0.0;       // +infinity when every platform is low-cost
  EntryThresholds entry;
};

/// Symmetric equilibrium candidate: every entrant at the common leak ratio
/// that puts the user exactly on the sharing/not-sharing boundary
/// (t = 1/(1 + 2 alpha - n) for the identity user shape). Non-entrants are
/// set to infinite noise.
///
/// Throws InfeasibleCandidate naming the first platform whose implied noise
/// variance would be negative.
NoiseProfile candidate_profile(const MarketParams& params,
                               PlatformSet entrants);

/// Noise profile supporting all of `sellers` on the user's indifference
/// boundary subject to per-platform lower bounds on sigma: platforms whose
/// symmetric level would undercut their bound are pinned there and the rest
/// share the remaining leak budget. Returns the all-pinned profile when the
/// user strictly prefers sharing even at the bounds, and nullopt when the
/// pinned platforms alone already leak too much for the user to share with
/// everyone.
std::optional<NoiseProfile> boundary_noise_profile(
    const MarketParams& params, PlatformSet sellers,
    const std::vector<double>& sigma_lower);

/// Reported alpha threshold for existence of the all-enter noise
/// equilibrium: for K = 2 the bisection root of
/// eta(alpha) + 1/(2 alpha - 1) - 1/alpha = 0 (about 1.884), the closed form
/// (K+1)^2/8 otherwise, and 0 for K = 1.
double alpha_bar(int k);

/// Sharp threshold from exact deviation analysis of the symmetric n-entrant
/// candidate: smallest alpha at which no upward-noise deviation is
/// profitable. Independent of gamma; depends on the utility shapes.
double alpha_bar_sharp(int n_entrants,
                       const UtilityShape& h_user = UtilityShape::identity(),
                       const UtilityShape& h_buyer = UtilityShape::identity());

EntryThresholds entry_threshold_sequence(const MarketParams& params);

/// All alpha/beta thresholds; requires the minimum-privacy assumption and
/// throws AssumptionViolated (with the violating entry set) otherwise.
Thresholds beta_thresholds(const MarketParams& params,
                           const SolverSettings& settings = {});

/// Largest leak ratio t' for the deviator at which the user, facing the
/// symmetric candidate elsewhere, weakly prefers sharing with exactly
/// `target_count` platforms (deviator included) over sharing with all
/// entrants. Returns the candidate t for target_count = n and 0 when no such
/// deviation exists.
double deviation_noise_bound(const MarketParams& params, PlatformSet entrants,
                             int deviator, int target_count);

/// Checks every deviation class against (noise, e): user best response,
/// boundary membership, upward-noise deviations per entrant and target size,
/// exits, and entries at the deviator's optimal noise. Optional per-platform
/// noise lower bounds and a banned set (platforms that may not sell) restrict
/// the deviation space under regulation.
VerificationCertificate verify_equilibrium(
    const MarketParams& params, const NoiseProfile& noise, PlatformSet entry,
    const SolverSettings& settings = {},
    const std::vector<double>* sigma_lower = nullptr, PlatformSet banned = 0);

/// Full backward-induction solve. K = 1 uses the closed-form regimes; K >= 2
/// selects the entrant set from the entry-threshold bracket containing beta,
/// builds the symmetric candidate and verifies it, falling back to a search
/// over cost-ordered entrant sets. A candidate that survives no verification
/// is returned as candidate_only; no_equilibrium_found covers instances where
/// no candidate can even be constructed.
EquilibriumResult solve(const MarketParams& params,
                        const SolverSettings& settings = {});

}  // namespace datamarket
