#pragma once

#include <span>
#include <vector>

#include "datamarket/market.hpp"
#include "datamarket/types.hpp"

namespace datamarket {

/// Information each serving platform learns about its own match. The user's
/// service-side noise variance is fixed at one, so this is the constant 1/2.
constexpr double platform_service_info() { return 0.5; }

/// Leak ratio t = gamma^2 / (2 + sigma^2); zero at infinite noise.
double noise_to_ratio(double gamma, double sigma);

/// Inverse of noise_to_ratio in sigma^2: gamma^2 / t - 2 (infinity at t = 0).
double ratio_to_sigma_sq(double gamma, double t);

/// Information the buyer extracts about y^T theta from the signals of the
/// platforms in `active`, computed as m^T M^{-1} m via a dense symmetric
/// solve on the restricted set. Platforms with infinite noise or gamma = 0
/// contribute nothing and are dropped before assembly.
///
/// Throws InvalidParams if any gamma is outside [0,1] or any sigma < 0, and
/// IndexError if `active` references platforms beyond K.
double revealed_info(const MarketParams& params, const NoiseProfile& noise,
                     PlatformSet active);

/// Two-platform closed form; agrees with revealed_info on {i,j} to 1e-12.
double revealed_info_pair(double gamma1, double gamma2, double sigma1,
                          double sigma2);

/// K platforms at a common leak ratio t: K t / (1 + (K-1) t).
double revealed_info_symmetric(int k, double t);

/// One platform at ratio t_prime, the remaining k-1 at t. Evaluated through
/// the exact rank-one form, so it matches revealed_info for every (t, t')
/// rather than only at t' = t.
double revealed_info_symmetric(int k, double t, double t_prime);

/// Rank-one evaluation from per-platform leak ratios: s/(1+s) with
/// s = sum t_i/(1-t_i). Used as an independent algebraic route in tests and
/// in threshold calculations.
double revealed_info_from_ratios(std::span<const double> ratios);

/// I(active + {i}) - I(active), floored at zero. This is the quantity the
/// buyer pays for at equilibrium prices.
///
/// Throws IndexError if i is already in `active` or out of range.
double marginal_info(const MarketParams& params, const NoiseProfile& noise,
                     PlatformSet active, int i);

/// Correlations gamma_i = x_i . y from raw characteristic vectors, checking
/// unit norms and the pairwise residual-orthogonality (substitutes)
/// condition. Throws SubstitutesViolated naming the offending pair.
std::vector<double> gammas_from_vectors(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    double tol);

}  // namespace datamarket
