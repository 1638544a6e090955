#include "datamarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace datamarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tau_of(double t) { return t / (1.0 - t); }
double t_of_tau(double tau) { return tau / (1.0 + tau); }

/// Required buyer-side information for the user to sit exactly on the
/// sharing boundary with n sellers: H_u(I) = n / (2 alpha). Returns +inf when
/// the shape cannot reach that level (the user then always shares).
double required_info(const MarketParams& params, int n_sellers) {
  const double target = static_cast<double>(n_sellers) / (2.0 * params.alpha);
  return params.h_user.inverse(target);
}

/// Leak budget s = I/(1-I) on the boundary; computed directly in the
/// identity case so candidate noise levels come out exact.
double required_leak_budget(const MarketParams& params, int n_sellers) {
  if (params.h_user.is_identity()) {
    const double denom = 2.0 * params.alpha - static_cast<double>(n_sellers);
    if (denom <= 0.0) return kInf;
    return static_cast<double>(n_sellers) / denom;
  }
  const double info = required_info(params, n_sellers);
  if (!std::isfinite(info) || info >= 1.0) return kInf;
  return info / (1.0 - info);
}

double symmetric_info(int count, double tau) {
  const double s = static_cast<double>(count) * tau;
  return s / (1.0 + s);
}

template <typename F>
double bisect(F&& f, double lo, double hi, double flo, int iters = 200) {
  // Root of a continuous f with f(lo), f(hi) of opposite sign; flo caches f(lo).
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm >= 0.0) == (flo >= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * (1.0 + std::fabs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::verified:
      return "verified";
    case SolveStatus::candidate_only:
      return "candidate_only";
    case SolveStatus::no_equilibrium_found:
      return "no_equilibrium_found";
  }
  return "unknown";
}

double VerificationCertificate::worst_gain() const {
  double g = -kInf;
  for (const auto& d : noise_deviations) g = std::max(g, d.gain);
  for (const auto& e : entry_deviations) g = std::max(g, e.gain);
  return g;
}

bool VerificationCertificate::verified(double gain_tol) const {
  if (!user_br_ok || !boundary_ok) return false;
  for (const auto& d : noise_deviations)
    if (d.gain > gain_tol) return false;
  for (const auto& e : entry_deviations)
    if (e.gain > gain_tol) return false;
  return true;
}

NoiseProfile candidate_profile(const MarketParams& params,
                               PlatformSet entrants) {
  params.validate();
  if (entrants & ~full_set(params.K))
    throw IndexError("entrant set references platforms beyond K");
  NoiseProfile out = NoiseProfile::silent(params.K);
  const int n = set_size(entrants);
  if (n == 0) return out;

  const double s_req = required_leak_budget(params, n);
  if (!std::isfinite(s_req) || s_req <= 0.0) {
    const int first = set_members(entrants, params.K).front();
    throw InfeasibleCandidate(first, -kInf);
  }
  const double tau = s_req / static_cast<double>(n);
  for (const int i : set_members(entrants, params.K)) {
    const double g = params.gamma[static_cast<std::size_t>(i)];
    // sigma^2 = gamma^2 / t - 2 with 1/t = 1 + 1/tau, kept in this form so the
    // identity-shape candidate is exact.
    const double sigma_sq = g * g * (1.0 + 1.0 / tau) - 2.0;
    if (sigma_sq < 0.0) throw InfeasibleCandidate(i, sigma_sq);
    out.sigma[static_cast<std::size_t>(i)] = std::sqrt(sigma_sq);
  }
  return out;
}

std::optional<NoiseProfile> boundary_noise_profile(
    const MarketParams& params, PlatformSet sellers,
    const std::vector<double>& sigma_lower) {
  const int n = set_size(sellers);
  NoiseProfile out = NoiseProfile::silent(params.K);
  const auto members = set_members(sellers, params.K);
  auto lb = [&](int i) {
    return sigma_lower.empty() ? 0.0 : sigma_lower[static_cast<std::size_t>(i)];
  };
  if (n == 0) return out;

  const double s_req = required_leak_budget(params, n);
  if (!std::isfinite(s_req)) {
    // The user shares no matter how much leaks; minimum noise is optimal.
    for (const int i : members) out.sigma[static_cast<std::size_t>(i)] = lb(i);
    return out;
  }

  std::vector<bool> pinned(members.size(), false);
  for (int round = 0; round <= n; ++round) {
    double budget = s_req;
    int free_count = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (pinned[k]) {
        budget -= tau_of(noise_to_ratio(
            params.gamma[static_cast<std::size_t>(members[k])], lb(members[k])));
      } else {
        ++free_count;
      }
    }
    if (budget < -1e-12) return std::nullopt;  // bounds alone leak too much
    if (free_count == 0) {
      for (const int i : members) out.sigma[static_cast<std::size_t>(i)] = lb(i);
      return out;
    }
    const double tau_free = std::max(0.0, budget) / free_count;
    bool moved = false;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (pinned[k]) continue;
      const double cap = tau_of(noise_to_ratio(
          params.gamma[static_cast<std::size_t>(members[k])], lb(members[k])));
      if (tau_free > cap) {
        pinned[k] = true;
        moved = true;
      }
    }
    if (moved) continue;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const int i = members[k];
      if (pinned[k]) {
        out.sigma[static_cast<std::size_t>(i)] = lb(i);
      } else {
        const double g = params.gamma[static_cast<std::size_t>(i)];
        const double sigma_sq =
            std::max(lb(i) * lb(i), g * g * (1.0 + 1.0 / tau_free) - 2.0);
        out.sigma[static_cast<std::size_t>(i)] = std::sqrt(sigma_sq);
      }
    }
    return out;
  }
  return std::nullopt;
}

namespace {

/// eta(alpha): leak ratio of the K = 2 deviator at the point where the user
/// is indifferent between sharing with both platforms and the deviator only.
double eta_k2(double alpha) {
  const double disc = 16.0 * alpha * alpha - 16.0 * alpha + 1.0;
  return 1.0 - 1.0 / (4.0 * alpha) - std::sqrt(disc) / (4.0 * alpha);
}

}  // namespace

double alpha_bar(int k) {
  if (k < 1) throw InvalidParams("alpha_bar needs K >= 1");
  if (k == 1) return 0.0;
  if (k == 2) {
    auto f = [](double a) {
      return eta_k2(a) + 1.0 / (2.0 * a - 1.0) - 1.0 / a;
    };
    double lo = 1.5, hi = 3.0;
    double flo = f(lo);
    for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm >= 0.0) == (flo >= 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  const double kp = static_cast<double>(k) + 1.0;
  return kp * kp / 8.0;
}

namespace {

/// Worst per-unit-beta price gain over upward-noise deviations from the
/// symmetric n-seller candidate in leak-ratio space (gamma-free). Returns
/// +inf when the candidate itself is infeasible at this alpha.
double worst_symmetric_deviation_gain(int n, double alpha,
                                      const UtilityShape& h_user,
                                      const UtilityShape& h_buyer) {
  MarketParams scratch;  // only alpha and the shapes matter here
  scratch.alpha = alpha;
  scratch.h_user = h_user;
  scratch.h_buyer = h_buyer;
  const double s_req = required_leak_budget(scratch, n);
  if (!std::isfinite(s_req) || s_req <= 0.0) return kInf;
  const double tau = s_req / n;
  const double t = t_of_tau(tau);
  if (t > 0.5) return kInf;  // sigma^2 would be negative even at gamma = 1

  const double info_full = s_req / (1.0 + s_req);
  const double info_rest = symmetric_info(n - 1, tau);
  const double marginal = h_buyer(info_full) - h_buyer(info_rest);

  auto info_with_dev = [&](int count, double t_prime) {
    const double s = tau_of(t_prime) + static_cast<double>(count - 1) * tau;
    return s / (1.0 + s);
  };
  double worst = -kInf;
  for (int m = 1; m < n; ++m) {
    auto g = [&](double tp) {
      const double u_all =
          0.5 * n - alpha * h_user(info_with_dev(n, tp));
      const double u_m = 0.5 * m - alpha * h_user(info_with_dev(m, tp));
      return u_all - u_m;
    };
    const double g0 = g(0.0);
    if (g0 >= 0.0) continue;  // the user never drops to m sharers
    const double tp_star = bisect(g, 0.0, t, g0);
    const double price_after =
        h_buyer(info_with_dev(m, tp_star)) -
        h_buyer(symmetric_info(m - 1, tau));
    worst = std::max(worst, price_after - marginal);
  }
  return worst;
}

}  // namespace

double alpha_bar_sharp(int n_entrants, const UtilityShape& h_user,
                       const UtilityShape& h_buyer) {
  if (n_entrants < 1) throw InvalidParams("alpha_bar_sharp needs n >= 1");
  if (n_entrants <= 1) return 0.0;
  auto gain = [&](double a) {
    return worst_symmetric_deviation_gain(n_entrants, a, h_user, h_buyer);
  };
  double hi = std::max(2.0, static_cast<double>(n_entrants));
  int guard = 0;
  while (gain(hi) > 0.0 && guard++ < 40) hi *= 2.0;
  double lo = 0.5;
  // Predicate bisection: gain <= 0 is upward-closed in alpha.
  for (int it = 0; it < 200 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gain(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

EntryThresholds entry_threshold_sequence(const MarketParams& params) {
  params.validate();
  const double two_alpha = 2.0 * params.alpha;
  if (two_alpha <= static_cast<double>(params.K))
    throw InvalidParams("entry thresholds need 2 alpha > K");

  EntryThresholds out;
  out.cost_order.resize(static_cast<std::size_t>(params.K));
  std::iota(out.cost_order.begin(), out.cost_order.end(), 0);
  std::stable_sort(out.cost_order.begin(), out.cost_order.end(),
                   [&](int a, int b) {
                     return params.cost[static_cast<std::size_t>(a)] <
                            params.cost[static_cast<std::size_t>(b)];
                   });
  out.low_cost_count = 0;
  for (int i = 0; i < params.K; ++i)
    if (params.low_cost(i)) ++out.low_cost_count;

  out.beta.assign(static_cast<std::size_t>(params.K), 0.0);
  out.beta_lower_bound.assign(static_cast<std::size_t>(params.K), 0.0);
  for (int pos = 0; pos < params.K; ++pos) {
    const double c =
        params.cost[static_cast<std::size_t>(out.cost_order[static_cast<std::size_t>(pos)])];
    out.beta_lower_bound[static_cast<std::size_t>(pos)] =
        std::max(0.0, two_alpha * (c - 0.5));
  }
  // Equal costs enter together, sharing the threshold of the group's last
  // sorted position.
  int pos = out.low_cost_count;
  while (pos < params.K) {
    const double c =
        params.cost[static_cast<std::size_t>(out.cost_order[static_cast<std::size_t>(pos)])];
    int last = pos;
    while (last + 1 < params.K &&
           params.cost[static_cast<std::size_t>(
               out.cost_order[static_cast<std::size_t>(last + 1)])] == c)
      ++last;
    const double i_one_based = static_cast<double>(last + 1);
    const double threshold =
        two_alpha * (two_alpha - 1.0) / (two_alpha - i_one_based) * (c - 0.5);
    for (int p = pos; p <= last; ++p)
      out.beta[static_cast<std::size_t>(p)] = threshold;
    pos = last + 1;
  }
  return out;
}

namespace {

/// Shaped marginal of one seller at the symmetric n-seller boundary
/// candidate. The boundary fixes the full-set information, so this is
/// gamma-free.
double candidate_marginal(const MarketParams& params, int n) {
  const double s_req = required_leak_budget(params, n);
  const double tau = s_req / n;
  const double info_full = s_req / (1.0 + s_req);
  return params.h_buyer(info_full) -
         params.h_buyer(symmetric_info(n - 1, tau));
}

/// Shaped marginal of a platform entering a symmetric n-seller candidate at
/// its own best (user-indifference) noise level.
double entry_marginal(const MarketParams& params, int n_before) {
  const double info_before =
      n_before == 0 ? 0.0 : required_info(params, n_before);
  const double info_after = required_info(params, n_before + 1);
  return params.h_buyer(info_after) - params.h_buyer(info_before);
}

}  // namespace

Thresholds beta_thresholds(const MarketParams& params,
                           const SolverSettings& settings) {
  params.validate();
  const auto assumption = check_privacy_assumption(params, settings);
  if (!assumption.holds)
    throw AssumptionViolated(assumption.violating_entry, assumption.margin);

  Thresholds th;
  th.alpha_bar = alpha_bar(params.K);
  th.alpha_bar_sharp = 0.0;
  for (int n = 2; n <= params.K; ++n)
    th.alpha_bar_sharp = std::max(
        th.alpha_bar_sharp, alpha_bar_sharp(n, params.h_user, params.h_buyer));

  th.entry = entry_threshold_sequence(params);

  double max_high_cost = -kInf;
  double min_high_cost = kInf;
  for (int i = 0; i < params.K; ++i) {
    if (params.low_cost(i)) continue;
    max_high_cost = std::max(max_high_cost, params.cost[static_cast<std::size_t>(i)]);
    min_high_cost = std::min(min_high_cost, params.cost[static_cast<std::size_t>(i)]);
  }

  if (max_high_cost == -kInf) {
    th.beta_bar = 0.0;
    th.beta_bar_refined = 0.0;
    th.beta_under = kInf;
    return th;
  }

  // All-enter sufficiency: the binding marginal across candidate sizes.
  double min_marginal = kInf;
  for (int n = 1; n <= params.K; ++n)
    min_marginal = std::min(min_marginal, candidate_marginal(params, n));
  th.beta_bar = (max_high_cost - 0.5) / min_marginal;

  // Hedge for asymmetric boundary profiles: scan the deviator's leak ratio
  // around the symmetric K-seller candidate, re-solving the rest onto the
  // boundary, and keep the smallest marginal seen.
  {
    const int n = params.K;
    const double s_req = required_leak_budget(params, n);
    const double tau = s_req / n;
    const double t = t_of_tau(tau);
    const double info_full = s_req / (1.0 + s_req);
    double worst = candidate_marginal(params, n);
    if (n >= 2) {
      for (int w = -settings.refine_window; w <= settings.refine_window; ++w) {
        const double tp = t + settings.refine_step * w;
        if (tp <= settings.sweep_t_floor || tp > 0.5) continue;
        const double rest = s_req - tau_of(tp);
        if (rest < 0.0) continue;
        const double tau_rest = rest / (n - 1);
        if (t_of_tau(tau_rest) > 0.5) continue;
        const double marg =
            params.h_buyer(info_full) -
            params.h_buyer(symmetric_info(n - 1, tau_rest));
        worst = std::min(worst, marg);
      }
    }
    th.beta_bar_refined =
        std::max(th.beta_bar, (max_high_cost - 0.5) / worst);
  }

  double max_entry_marginal = 0.0;
  for (int n = 0; n < params.K; ++n)
    max_entry_marginal =
        std::max(max_entry_marginal, entry_marginal(params, n));
  th.beta_under = (min_high_cost - 0.5) / max_entry_marginal;
  return th;
}

double deviation_noise_bound(const MarketParams& params, PlatformSet entrants,
                             int deviator, int target_count) {
  params.validate();
  if (deviator < 0 || deviator >= params.K || !contains(entrants, deviator))
    throw IndexError("deviator must be one of the entrants");
  const int n = set_size(entrants);
  if (target_count < 1 || target_count > n)
    throw IndexError("target sharing count must lie in [1, n]");

  const double s_req = required_leak_budget(params, n);
  if (!std::isfinite(s_req) || s_req <= 0.0)
    throw InfeasibleCandidate(deviator, -kInf);
  const double tau = s_req / n;
  const double t = t_of_tau(tau);
  if (target_count == n) return t;

  const double alpha = params.alpha;
  auto info_with_dev = [&](int count, double tp) {
    const double s = tau_of(tp) + static_cast<double>(count - 1) * tau;
    return s / (1.0 + s);
  };
  auto g = [&](double tp) {
    const double u_all = 0.5 * n - alpha * params.h_user(info_with_dev(n, tp));
    const double u_m =
        0.5 * target_count -
        alpha * params.h_user(info_with_dev(target_count, tp));
    return u_all - u_m;
  };
  const double g0 = g(0.0);
  if (g0 >= 0.0) return 0.0;  // the user never drops that many platforms
  return bisect(g, 0.0, t, g0);
}

namespace {

struct DeviationEval {
  PlatformSet response = 0;
  double utility = 0.0;
};

DeviationEval eval_noise_deviation(const MarketParams& params,
                                   const NoiseProfile& base, PlatformSet entry,
                                   int platform, double t_prime,
                                   const SolverSettings& settings) {
  NoiseProfile tweaked = base;
  const double g = params.gamma[static_cast<std::size_t>(platform)];
  const double ssq = ratio_to_sigma_sq(g, t_prime);
  tweaked.sigma[static_cast<std::size_t>(platform)] =
      std::isfinite(ssq) ? std::sqrt(std::max(0.0, ssq)) : kInfiniteNoise;
  DeviationEval ev;
  ev.response = user_best_response(params, tweaked, entry, settings);
  const PriceVector p = equilibrium_prices(params, tweaked, entry, ev.response);
  const StageOutcome out = stage_utilities(params, tweaked, entry, ev.response,
                                           p, full_set(params.K));
  ev.utility = out.u_platforms[static_cast<std::size_t>(platform)];
  return ev;
}

DeviationEval eval_entry_deviation(const MarketParams& params,
                                   const NoiseProfile& base, PlatformSet entry,
                                   int platform, double t_entry,
                                   const SolverSettings& settings) {
  NoiseProfile tweaked = base;
  const double g = params.gamma[static_cast<std::size_t>(platform)];
  const double ssq = ratio_to_sigma_sq(g, t_entry);
  tweaked.sigma[static_cast<std::size_t>(platform)] =
      std::isfinite(ssq) ? std::sqrt(std::max(0.0, ssq)) : kInfiniteNoise;
  const PlatformSet entry2 = entry | platform_bit(platform);
  DeviationEval ev;
  ev.response = user_best_response(params, tweaked, entry2, settings);
  const PriceVector p = equilibrium_prices(params, tweaked, entry2, ev.response);
  const StageOutcome out = stage_utilities(params, tweaked, entry2, ev.response,
                                           p, full_set(params.K));
  ev.utility = out.u_platforms[static_cast<std::size_t>(platform)];
  return ev;
}

bool symmetric_ratios(const MarketParams& params, const NoiseProfile& noise,
                      PlatformSet sellers) {
  double t0 = -1.0;
  for (const int i : set_members(sellers, params.K)) {
    const double t = noise_to_ratio(params.gamma[static_cast<std::size_t>(i)],
                                    noise.sigma[static_cast<std::size_t>(i)]);
    if (t0 < 0.0)
      t0 = t;
    else if (std::fabs(t - t0) > 1e-10)
      return false;
  }
  return true;
}

}  // namespace

VerificationCertificate verify_equilibrium(
    const MarketParams& params, const NoiseProfile& noise, PlatformSet entry,
    const SolverSettings& settings, const std::vector<double>* sigma_lower,
    PlatformSet banned) {
  params.validate();
  noise.validate(params.K);
  if (entry & ~full_set(params.K))
    throw IndexError("entry set references platforms beyond K");

  auto lb = [&](int i) {
    if (!sigma_lower) return 0.0;
    const double b = (*sigma_lower)[static_cast<std::size_t>(i)];
    return std::isfinite(b) ? b : 0.0;
  };

  VerificationCertificate cert;
  const PlatformSet sellers = entry & ~banned;
  const PlatformSet br = user_best_response(params, noise, entry, settings);
  cert.user_br_ok = (br == entry);

  const PriceVector prices = equilibrium_prices(params, noise, entry, entry);
  const StageOutcome out = stage_utilities(params, noise, entry, entry, prices,
                                           full_set(params.K));

  // On-boundary check: every seller is either pinned at its lower bound or
  // the user sits exactly on the sharing boundary, so nobody can profitably
  // lower their noise.
  cert.boundary_ok = out.u_user >= -settings.lin_tol;
  for (const int i : set_members(sellers, params.K)) {
    const bool pinned =
        noise.sigma_sq(i) <= lb(i) * lb(i) + settings.lin_tol;
    if (!pinned && out.u_user > settings.lin_tol) cert.boundary_ok = false;
  }

  // Exit deviations: an entrant leaving earns exactly zero.
  for (const int i : set_members(entry, params.K)) {
    cert.entry_deviations.push_back(
        {i, false, -out.u_platforms[static_cast<std::size_t>(i)],
         noise.sigma[static_cast<std::size_t>(i)]});
  }

  // The expensive sweeps only make sense against a self-consistent profile.
  if (!cert.user_br_ok) return cert;

  const int n_sellers = set_size(sellers);
  const bool symmetric = symmetric_ratios(params, noise, sellers);

  // Upward-noise deviations.
  for (const int i : set_members(sellers, params.K)) {
    const double u_base = out.u_platforms[static_cast<std::size_t>(i)];
    const double t_cand =
        noise_to_ratio(params.gamma[static_cast<std::size_t>(i)],
                       noise.sigma[static_cast<std::size_t>(i)]);
    if (t_cand <= settings.sweep_t_floor) continue;

    std::map<int, DeviationRecord> best;  // keyed by target sharing count
    auto consider = [&](double tp, const DeviationEval& ev) {
      const int target = set_size(ev.response);
      const double gain = ev.utility - u_base;
      auto it = best.find(target);
      if (it == best.end() || gain > it->second.gain)
        best[target] = {i, target, gain, tp};
    };

    // Closed-form probes at symmetric candidates.
    if (symmetric && n_sellers >= 2 && entry == sellers) {
      for (int m = 1; m < n_sellers; ++m) {
        double tp = 0.0;
        try {
          tp = deviation_noise_bound(params, entry, i, m);
        } catch (const Error&) {
          break;
        }
        if (tp <= settings.sweep_t_floor) continue;
        if (tp >= t_cand) continue;  // only raising noise is a deviation here
        const double probe = tp * (1.0 - 1e-9);
        consider(probe, eval_noise_deviation(params, noise, entry, i, probe,
                                             settings));
      }
    }

    double prev_t = t_cand;
    PlatformSet prev_response = entry;
    for (int k = 1; k <= settings.sweep_points; ++k) {
      const double tp =
          t_cand + (settings.sweep_t_floor - t_cand) *
                       (static_cast<double>(k) / settings.sweep_points);
      const DeviationEval ev =
          eval_noise_deviation(params, noise, entry, i, tp, settings);
      if (ev.response != prev_response) {
        // Pin down the response switch and evaluate just past it, where the
        // deviator's payoff is largest within the new region.
        double hi = prev_t, lo = tp;
        for (int it2 = 0; it2 < 60; ++it2) {
          const double mid = 0.5 * (lo + hi);
          if (eval_noise_deviation(params, noise, entry, i, mid, settings)
                  .response == prev_response)
            hi = mid;
          else
            lo = mid;
        }
        consider(lo,
                 eval_noise_deviation(params, noise, entry, i, lo, settings));
      }
      consider(tp, ev);
      prev_t = tp;
      prev_response = ev.response;
    }
    for (const auto& [target, rec] : best)
      cert.noise_deviations.push_back(rec);
  }

  // Entry deviations at the deviator's own best noise level.
  for (int j = 0; j < params.K; ++j) {
    if (contains(entry, j)) continue;
    if (contains(banned, j)) {
      const DeviationEval ev =
          eval_entry_deviation(params, noise, entry, j, 0.0, settings);
      cert.entry_deviations.push_back({j, true, ev.utility, kInfiniteNoise});
      continue;
    }
    const double cap =
        noise_to_ratio(params.gamma[static_cast<std::size_t>(j)], lb(j));
    EntryRecord rec{j, true, -kInf, kInfiniteNoise};
    auto consider = [&](double tj) {
      const DeviationEval ev =
          eval_entry_deviation(params, noise, entry, j, tj, settings);
      if (ev.utility > rec.gain) {
        rec.gain = ev.utility;
        const double ssq =
            ratio_to_sigma_sq(params.gamma[static_cast<std::size_t>(j)], tj);
        rec.sigma = std::isfinite(ssq) ? std::sqrt(std::max(0.0, ssq))
                                       : kInfiniteNoise;
      }
      return ev;
    };
    if (cap <= settings.sweep_t_floor) {
      consider(0.0);
    } else {
      double prev_t = cap;
      PlatformSet prev_response = consider(cap).response;
      for (int k = 1; k <= settings.sweep_points; ++k) {
        const double tj =
            cap + (settings.sweep_t_floor - cap) *
                      (static_cast<double>(k) / settings.sweep_points);
        const DeviationEval ev = consider(tj);
        if (ev.response != prev_response) {
          // The largest noise keeping j in the user's response attains the
          // supremum; ties resolve toward sharing, so it is reachable.
          double hi = prev_t, lo = tj;
          for (int it2 = 0; it2 < 60; ++it2) {
            const double mid = 0.5 * (lo + hi);
            const bool in_resp = contains(
                eval_entry_deviation(params, noise, entry, j, mid, settings)
                    .response,
                j);
            if (in_resp == contains(prev_response, j))
              hi = mid;
            else
              lo = mid;
          }
          consider(hi);
          consider(lo);
        }
        prev_t = tj;
        prev_response = ev.response;
      }
    }
    cert.entry_deviations.push_back(rec);
  }

  return cert;
}

namespace {

EquilibriumResult assemble_result(const MarketParams& params,
                                  const NoiseProfile& noise, PlatformSet entry,
                                  const SolverSettings& settings,
                                  const std::vector<double>* sigma_lower,
                                  PlatformSet banned) {
  EquilibriumResult res;
  res.noise = noise;
  res.entry = entry;
  res.certificate =
      verify_equilibrium(params, noise, entry, settings, sigma_lower, banned);
  res.sharing = user_best_response(params, noise, entry, settings);
  res.prices = equilibrium_prices(params, noise, entry, res.sharing);
  res.outcome = stage_utilities(params, noise, entry, res.sharing, res.prices,
                                full_set(params.K));
  res.buyer = res.outcome.buyer;
  if (res.certificate.verified(settings.gain_tol)) {
    res.status = SolveStatus::verified;
  } else if (res.certificate.user_br_ok && res.certificate.boundary_ok) {
    // Cleanly refuted by a profitable deviation.
    res.status = SolveStatus::no_equilibrium_found;
  } else {
    res.status = SolveStatus::candidate_only;
  }
  return res;
}

EquilibriumResult solve_single_platform(const MarketParams& params,
                                        const SolverSettings& settings) {
  const double g = params.gamma[0];
  const double c = params.cost[0];
  const double info_zero_noise = g * g / 2.0;
  const bool shares_at_zero =
      0.5 - params.alpha * params.h_user(info_zero_noise) >= -settings.tie_tol;

  NoiseProfile noise = NoiseProfile::silent(1);
  bool enter = false;
  if (shares_at_zero) {
    noise.sigma[0] = 0.0;
    enter = 0.5 - c + params.beta * params.h_buyer(info_zero_noise) >=
            -settings.gain_tol;
  } else {
    const double t = required_info(params, 1);
    noise.sigma[0] = std::sqrt(ratio_to_sigma_sq(g, t));
    enter = 0.5 - c + params.beta * params.h_buyer(t) >= -settings.gain_tol;
  }
  const PlatformSet entry = enter ? full_set(1) : 0;
  if (!enter) noise = NoiseProfile::silent(1);
  return assemble_result(params, noise, entry, settings, nullptr, 0);
}

}  // namespace

EquilibriumResult solve(const MarketParams& params,
                        const SolverSettings& settings) {
  params.validate();
  if (params.K == 1) return solve_single_platform(params, settings);

  std::optional<EntryThresholds> entry_seq;
  if (2.0 * params.alpha > static_cast<double>(params.K))
    entry_seq = entry_threshold_sequence(params);

  std::vector<int> order(static_cast<std::size_t>(params.K));
  std::iota(order.begin(), order.end(), 0);
  if (entry_seq) order = entry_seq->cost_order;
  else
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return params.cost[static_cast<std::size_t>(a)] <
             params.cost[static_cast<std::size_t>(b)];
    });

  auto prefix_set = [&](int m) {
    PlatformSet s = 0;
    for (int k = 0; k < m; ++k) s |= platform_bit(order[static_cast<std::size_t>(k)]);
    return s;
  };

  std::vector<PlatformSet> candidates;
  if (entry_seq) {
    int m = entry_seq->low_cost_count;
    for (int pos = entry_seq->low_cost_count; pos < params.K; ++pos) {
      if (params.beta >= entry_seq->beta[static_cast<std::size_t>(pos)])
        m = pos + 1;
    }
    candidates.push_back(prefix_set(m));
  }
  for (int m = 0; m <= params.K; ++m) {
    const PlatformSet s = prefix_set(m);
    if (std::find(candidates.begin(), candidates.end(), s) == candidates.end())
      candidates.push_back(s);
  }

  std::optional<EquilibriumResult> fallback;
  for (const PlatformSet e : candidates) {
    NoiseProfile profile = NoiseProfile::silent(params.K);
    if (e != 0) {
      const auto built =
          boundary_noise_profile(params, e, std::vector<double>{});
      if (!built) continue;
      profile = *built;
    }
    EquilibriumResult res =
        assemble_result(params, profile, e, settings, nullptr, 0);
    if (res.status == SolveStatus::verified) return res;
    if (!fallback) fallback = std::move(res);
  }
  if (fallback) return *fallback;

  EquilibriumResult none;
  none.noise = NoiseProfile::silent(params.K);
  none.prices.p.assign(static_cast<std::size_t>(params.K), 0.0);
  none.outcome.u_platforms.assign(static_cast<std::size_t>(params.K), 0.0);
  none.status = SolveStatus::no_equilibrium_found;
  return none;
}

}  // namespace datamarket
