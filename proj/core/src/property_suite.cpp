#include "datamarket/property_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "datamarket/equilibrium.hpp"
#include "datamarket/regulation.hpp"

namespace datamarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Deterministic uniform source: identical streams on every platform, unlike
/// the distribution adaptors in <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) {
    return std::min(hi, lo + static_cast<int>(unit() * (hi - lo + 1)));
  }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

struct Instance {
  MarketParams params;
  NoiseProfile noise;
};

Instance random_instance(Rng& rng, int k_min, int k_max,
                         bool allow_infinite_noise = true) {
  Instance inst;
  inst.params.K = rng.integer(k_min, k_max);
  inst.params.alpha = rng.range(0.5, 6.0);
  inst.params.beta = rng.range(0.0, 8.0);
  for (int i = 0; i < inst.params.K; ++i) {
    inst.params.gamma.push_back(rng.chance(0.05) ? 0.0 : rng.range(0.05, 1.0));
    inst.params.cost.push_back(rng.range(0.0, 1.2));
    const bool silent = allow_infinite_noise && rng.chance(0.1);
    inst.noise.sigma.push_back(silent ? kInfiniteNoise : rng.range(0.0, 4.0));
  }
  return inst;
}

PlatformSet random_subset(Rng& rng, PlatformSet of, int k) {
  PlatformSet s = 0;
  for (int i = 0; i < k; ++i)
    if (contains(of, i) && rng.chance(0.5)) s |= platform_bit(i);
  return s;
}

std::string describe(const Instance& inst, const std::string& extra) {
  std::ostringstream os;
  os.precision(17);
  os << "K=" << inst.params.K << " alpha=" << inst.params.alpha
     << " beta=" << inst.params.beta << " gamma=[";
  for (const double g : inst.params.gamma) os << g << " ";
  os << "] cost=[";
  for (const double c : inst.params.cost) os << c << " ";
  os << "] sigma=[";
  for (const double s : inst.noise.sigma) os << s << " ";
  os << "] " << extra;
  return os.str();
}

template <typename F>
PropertyResult run_check(const std::string& name, std::uint64_t seed,
                         int trials, F&& body) {
  PropertyResult res{name, trials, true, ""};
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::string ce;
    if (!body(rng, &ce)) {
      res.passed = false;
      std::ostringstream os;
      os << "trial " << t << ": " << ce;
      res.counterexample = os.str();
      break;
    }
  }
  return res;
}

bool shape_family_submodular(const MarketParams& params,
                             const NoiseProfile& noise,
                             const UtilityShape& shape, Rng& rng,
                             std::string* ce) {
  const PlatformSet full = full_set(params.K);
  const PlatformSet t_set = random_subset(rng, full, params.K);
  const PlatformSet s_set = random_subset(rng, t_set, params.K);
  const PlatformSet rest = full & ~t_set;
  if (rest == 0) return true;
  const int i = set_members(rest, params.K).front();
  const double ds =
      shape(revealed_info(params, noise, s_set | platform_bit(i))) -
      shape(revealed_info(params, noise, s_set));
  const double dt =
      shape(revealed_info(params, noise, t_set | platform_bit(i))) -
      shape(revealed_info(params, noise, t_set));
  if (ds >= dt - 1e-9) return true;
  std::ostringstream os;
  os << "shaped marginals " << ds << " < " << dt;
  *ce = os.str();
  return false;
}

}  // namespace

namespace detail {

PropertyResult submodularity_in_actions_check(std::uint64_t seed, int trials,
                                              bool flipped) {
  return run_check(
      flipped ? "info-submodularity-actions-flipped"
              : "info-submodularity-actions",
      seed, trials, [flipped](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 2, 6);
        const PlatformSet full = full_set(inst.params.K);
        const PlatformSet t_set = random_subset(rng, full, inst.params.K);
        const PlatformSet s_set = random_subset(rng, t_set, inst.params.K);
        const PlatformSet rest = full & ~t_set;
        if (rest == 0) return true;
        const int i = set_members(rest, inst.params.K).front();
        const double ds = revealed_info(inst.params, inst.noise,
                                        s_set | platform_bit(i)) -
                          revealed_info(inst.params, inst.noise, s_set);
        const double dt = revealed_info(inst.params, inst.noise,
                                        t_set | platform_bit(i)) -
                          revealed_info(inst.params, inst.noise, t_set);
        const bool ok = flipped ? ds <= dt - 1e-9 : ds >= dt - 1e-9;
        if (!ok) {
          std::ostringstream os;
          os << "S=" << s_set << " T=" << t_set << " i=" << i
             << " dS=" << ds << " dT=" << dt;
          *ce = describe(inst, os.str());
        }
        return ok;
      });
}

}  // namespace detail

bool PropertyReport::all_passed() const {
  for (const auto& s : suites)
    if (!s.passed) return false;
  return true;
}

std::string PropertyReport::to_text() const {
  std::ostringstream os;
  for (const auto& s : suites) {
    os << (s.passed ? "PASS" : "FAIL") << " " << s.name
       << " trials=" << s.trials;
    if (!s.passed) os << "\n  counterexample: " << s.counterexample;
    os << "\n";
  }
  os << (all_passed() ? "all suites passed" : "suite failures detected")
     << "\n";
  return os.str();
}

PropertyReport run_property_suite(std::uint64_t seed, int trials,
                                  const SolverSettings& settings) {
  if (trials < 1) throw InvalidParams("trials must be >= 1");
  PropertyReport report;
  const int slow_trials = std::clamp(trials / 200, 4, 50);
  const int solve_trials = std::clamp(trials / 400, 3, 25);
  std::uint64_t stream = seed;
  auto next_seed = [&stream]() { return stream += 0x9e3779b97f4a7c15ull; };

  // --- information kernel -------------------------------------------------

  report.suites.push_back(run_check(
      "info-monotonicity-set", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 1, 6);
        const PlatformSet t_set =
            random_subset(rng, full_set(inst.params.K), inst.params.K);
        const PlatformSet s_set = random_subset(rng, t_set, inst.params.K);
        const double is = revealed_info(inst.params, inst.noise, s_set);
        const double it = revealed_info(inst.params, inst.noise, t_set);
        if (is <= it + 1e-9) return true;
        std::ostringstream os;
        os << "I(S)=" << is << " I(T)=" << it;
        *ce = describe(inst, os.str());
        return false;
      }));

  report.suites.push_back(run_check(
      "info-monotonicity-noise", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        Instance inst = random_instance(rng, 1, 6, false);
        const PlatformSet s_set =
            random_subset(rng, full_set(inst.params.K), inst.params.K);
        if (s_set == 0) return true;
        const int i = set_members(s_set, inst.params.K).front();
        double prev = kInf;
        for (int g = 0; g <= 5; ++g) {
          inst.noise.sigma[static_cast<std::size_t>(i)] =
              static_cast<double>(g);
          const double info = revealed_info(inst.params, inst.noise, s_set);
          if (info > prev + 1e-9) {
            std::ostringstream os;
            os << "I increased to " << info << " at sigma_" << i << "=" << g;
            *ce = describe(inst, os.str());
            return false;
          }
          prev = info;
        }
        return true;
      }));

  report.suites.push_back(
      detail::submodularity_in_actions_check(next_seed(), trials, false));

  report.suites.push_back(run_check(
      "info-submodularity-noise", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        Instance inst = random_instance(rng, 2, 6, false);
        const int k = inst.params.K;
        const PlatformSet full = full_set(k);
        PlatformSet s_set = random_subset(rng, full, k);
        const PlatformSet rest = full & ~s_set;
        if (rest == 0 || s_set == 0) return true;
        const int i = set_members(rest, k).front();
        const int j = set_members(s_set, k).front();
        // Nonincreasing in the deviator's own noise.
        double prev = kInf;
        for (int g = 0; g <= 4; ++g) {
          inst.noise.sigma[static_cast<std::size_t>(i)] = g;
          const double m = marginal_info(inst.params, inst.noise, s_set, i);
          if (m > prev + 1e-9) {
            *ce = describe(inst, "marginal increased in own sigma");
            return false;
          }
          prev = m;
        }
        // Nondecreasing in an incumbent's noise.
        inst.noise.sigma[static_cast<std::size_t>(i)] = rng.range(0.0, 3.0);
        prev = -kInf;
        for (int g = 0; g <= 4; ++g) {
          inst.noise.sigma[static_cast<std::size_t>(j)] = g;
          const double m = marginal_info(inst.params, inst.noise, s_set, i);
          if (m < prev - 1e-9) {
            *ce = describe(inst, "marginal decreased in incumbent sigma");
            return false;
          }
          prev = m;
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "info-closed-form-agreement", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        // Pair form, symmetric forms and the rank-one route all agree with
        // the dense solve to 1e-12.
        const int k = rng.integer(1, 6);
        MarketParams params;
        params.K = k;
        params.alpha = 1.0;
        params.beta = 0.0;
        NoiseProfile noise;
        const double t_common = rng.range(0.0, 0.5);
        const double gamma_common = rng.range(0.3, 1.0);
        const bool symmetric = rng.chance(0.5);
        std::vector<double> ratios;
        for (int i = 0; i < k; ++i) {
          const double g = symmetric ? gamma_common : rng.range(0.05, 1.0);
          params.gamma.push_back(g);
          params.cost.push_back(0.0);
          double t = symmetric ? t_common : rng.range(0.0, g * g / 2.0);
          if (t > g * g / 2.0) t = g * g / 2.0;
          const double ssq = ratio_to_sigma_sq(g, t);
          noise.sigma.push_back(std::isfinite(ssq)
                                    ? std::sqrt(std::max(0.0, ssq))
                                    : kInfiniteNoise);
          ratios.push_back(noise_to_ratio(g, noise.sigma.back()));
        }
        const PlatformSet full = full_set(k);
        const double dense = revealed_info(params, noise, full);
        const double rank_one = revealed_info_from_ratios(ratios);
        if (std::fabs(dense - rank_one) > 1e-12) {
          *ce = describe({params, noise}, "rank-one route disagrees");
          return false;
        }
        if (k == 2) {
          const double pair = revealed_info_pair(
              params.gamma[0], params.gamma[1], noise.sigma[0], noise.sigma[1]);
          if (std::fabs(dense - pair) > 1e-12) {
            *ce = describe({params, noise}, "pair form disagrees");
            return false;
          }
        }
        if (symmetric) {
          const double t = ratios.front();
          if (std::fabs(dense - revealed_info_symmetric(k, t)) > 1e-12) {
            *ce = describe({params, noise}, "symmetric form disagrees");
            return false;
          }
          if (k >= 1) {
            const double tp = rng.range(0.0, 0.5);
            const double direct = revealed_info_symmetric(k, t, tp);
            std::vector<double> mixed = ratios;
            mixed[0] = tp;
            if (std::fabs(direct - revealed_info_from_ratios(mixed)) > 1e-12) {
              *ce = describe({params, noise}, "two-ratio form disagrees");
              return false;
            }
          }
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "info-range", next_seed(), trials, [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 1, 6);
        const PlatformSet s_set =
            random_subset(rng, full_set(inst.params.K), inst.params.K);
        const double info = revealed_info(inst.params, inst.noise, s_set);
        if (info < 0.0 || info > 1.0) {
          *ce = describe(inst, "info outside [0,1]");
          return false;
        }
        if (set_size(s_set) <= 2) {
          double cap = 0.0;
          for (const int i : set_members(s_set, inst.params.K))
            cap = std::max(cap,
                           inst.params.gamma[static_cast<std::size_t>(i)] *
                               inst.params.gamma[static_cast<std::size_t>(i)]);
          if (info > cap + 1e-12) {
            *ce = describe(inst, "pair info above max gamma^2");
            return false;
          }
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "shape-composition-submodularity", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 2, 6);
        const UtilityShape log_shape = UtilityShape::log1p_normalized();
        if (!shape_family_submodular(inst.params, inst.noise, log_shape, rng,
                                     ce)) {
          *ce = describe(inst, *ce + " (log shape)");
          return false;
        }
        const UtilityShape root_like =
            UtilityShape::table({0.0, 0.5, 0.75, 0.9, 1.0});
        if (!shape_family_submodular(inst.params, inst.noise, root_like, rng,
                                     ce)) {
          *ce = describe(inst, *ce + " (table shape)");
          return false;
        }
        return true;
      }));

  // --- stage game ----------------------------------------------------------

  report.suites.push_back(run_check(
      "price-buyer-rationality", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 1, 6);
        const int k = inst.params.K;
        const PlatformSet e = random_subset(rng, full_set(k), k);
        const PlatformSet a = random_subset(rng, e, k);
        const PriceVector p =
            equilibrium_prices(inst.params, inst.noise, e, a);
        const PlatformSet active = a & e;
        auto buyer_value = [&](PlatformSet b) {
          const PlatformSet eff = b & active;
          double pay = 0.0;
          for (const int i : set_members(eff, k))
            pay += p.p[static_cast<std::size_t>(i)];
          return inst.params.beta *
                     inst.params.h_buyer(
                         revealed_info(inst.params, inst.noise, eff)) -
                 pay;
        };
        const double accept_all = buyer_value(active);
        for (PlatformSet b = 0; b <= full_set(k); ++b) {
          if (buyer_value(b) > accept_all + 1e-9) {
            std::ostringstream os;
            os << "buyer prefers b=" << b;
            *ce = describe(inst, os.str());
            return false;
          }
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "user-argmax-lattice", next_seed(), trials,
      [&settings](Rng& rng, std::string* ce) {
        Instance inst = random_instance(rng, 1, 6);
        // Half the trials sit exactly on a constructed boundary tie.
        if (rng.chance(0.5)) {
          inst.params.alpha = rng.range(2.0, 6.0);
          for (auto& g : inst.params.gamma) g = 1.0;
          try {
            inst.noise =
                candidate_profile(inst.params, full_set(inst.params.K));
          } catch (const Error&) {
            return true;
          }
        }
        const int k = inst.params.K;
        const PlatformSet e = full_set(k);
        std::vector<PlatformSet> argmax;
        double best = -kInf;
        for (PlatformSet a = 0; a <= e; ++a) {
          const double u = user_utility(inst.params, inst.noise, e, a);
          best = std::max(best, u);
        }
        for (PlatformSet a = 0; a <= e; ++a) {
          if (user_utility(inst.params, inst.noise, e, a) >=
              best - settings.tie_tol)
            argmax.push_back(a);
        }
        for (const PlatformSet s : argmax) {
          for (const PlatformSet t : argmax) {
            const double uj =
                user_utility(inst.params, inst.noise, e, s | t);
            const double um =
                user_utility(inst.params, inst.noise, e, s & t);
            if (uj < best - 2e-9 || um < best - 2e-9) {
              std::ostringstream os;
              os << "argmax not closed for union/intersection of " << s
                 << " and " << t;
              *ce = describe(inst, os.str());
              return false;
            }
          }
        }
        const PlatformSet br =
            user_best_response(inst.params, inst.noise, e, settings);
        for (const PlatformSet s : argmax) {
          if ((br | s) != br) {
            *ce = describe(inst, "best response is not lattice-maximal");
            return false;
          }
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "user-utility-supermodular", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 2, 6);
        const int k = inst.params.K;
        const PlatformSet e = full_set(k);
        const PlatformSet s = random_subset(rng, e, k);
        const PlatformSet t = random_subset(rng, e, k);
        const double lhs = user_utility(inst.params, inst.noise, e, s | t) +
                           user_utility(inst.params, inst.noise, e, s & t);
        const double rhs = user_utility(inst.params, inst.noise, e, s) +
                           user_utility(inst.params, inst.noise, e, t);
        if (lhs >= rhs - 1e-9) return true;
        *ce = describe(inst, "user utility not supermodular");
        return false;
      }));

  report.suites.push_back(run_check(
      "region-permutation-invariance", next_seed(), trials,
      [&settings](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 2, 6);
        const int k = inst.params.K;
        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int i = k - 1; i > 0; --i)
          std::swap(perm[static_cast<std::size_t>(i)],
                    perm[static_cast<std::size_t>(rng.integer(0, i))]);
        Instance permuted = inst;
        for (int i = 0; i < k; ++i) {
          permuted.params.gamma[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
              inst.params.gamma[static_cast<std::size_t>(i)];
          permuted.params.cost[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
              inst.params.cost[static_cast<std::size_t>(i)];
          permuted.noise.sigma[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
              inst.noise.sigma[static_cast<std::size_t>(i)];
        }
        const PlatformSet e = random_subset(rng, full_set(k), k);
        PlatformSet e_perm = 0;
        for (int i = 0; i < k; ++i)
          if (contains(e, i))
            e_perm |= platform_bit(perm[static_cast<std::size_t>(i)]);
        const PlatformSet label =
            region_of(inst.params, inst.noise, e, settings);
        const PlatformSet label_perm =
            region_of(permuted.params, permuted.noise, e_perm, settings);
        PlatformSet mapped = 0;
        for (int i = 0; i < k; ++i)
          if (contains(label, i))
            mapped |= platform_bit(perm[static_cast<std::size_t>(i)]);
        if (mapped == label_perm) return true;
        *ce = describe(inst, "region label not permutation-invariant");
        return false;
      }));

  report.suites.push_back(run_check(
      "payment-welfare-identity", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 1, 6);
        const int k = inst.params.K;
        const PlatformSet e = random_subset(rng, full_set(k), k);
        const PlatformSet a = random_subset(rng, e, k);
        const PlatformSet b = random_subset(rng, a, k);
        const PriceVector p =
            equilibrium_prices(inst.params, inst.noise, e, a);
        const StageOutcome out =
            stage_utilities(inst.params, inst.noise, e, a, p, b);
        const double component_sum = welfare(out, inst.params);
        double direct = set_size(a & e) * 1.0;  // both service terms
        for (const int i : set_members(e, k))
          direct -= inst.params.cost[static_cast<std::size_t>(i)];
        direct -= inst.params.alpha * inst.params.h_user(out.info_to_buyer);
        direct += inst.params.beta * inst.params.h_buyer(out.info_to_buyer);
        if (std::fabs(component_sum - direct) <= 1e-9) return true;
        *ce = describe(inst, "payments fail to cancel in welfare");
        return false;
      }));

  report.suites.push_back(run_check(
      "identity-shape-bitwise", next_seed(), trials,
      [](Rng& rng, std::string* ce) {
        const Instance inst = random_instance(rng, 1, 6);
        const int k = inst.params.K;
        const PlatformSet e = random_subset(rng, full_set(k), k);
        const PlatformSet a = random_subset(rng, e, k);
        const PriceVector p =
            equilibrium_prices(inst.params, inst.noise, e, a);
        const StageOutcome out =
            stage_utilities(inst.params, inst.noise, e, a, p, a & e);
        const double info = revealed_info(inst.params, inst.noise, a & e);
        const double linear_user =
            0.5 * set_size(a & e) - inst.params.alpha * info;
        double pay = 0.0;
        for (const int i : set_members(a & e, k))
          pay += p.p[static_cast<std::size_t>(i)];
        const double linear_buyer = inst.params.beta * info - pay;
        if (out.u_user == linear_user && out.u_buyer == linear_buyer)
          return true;
        *ce = describe(inst, "identity shapes drifted from the linear path");
        return false;
      }));

  // --- equilibrium ---------------------------------------------------------

  report.suites.push_back(run_check(
      "equilibrium-zero-user-utility", next_seed(), slow_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = rng.integer(2, 4);
        params.h_user = UtilityShape::identity();
        params.h_buyer = UtilityShape::identity();
        params.alpha =
            alpha_bar_sharp(params.K) + rng.range(0.3, 2.0);
        for (int i = 0; i < params.K; ++i) {
          params.gamma.push_back(rng.range(0.9, 1.0));
          params.cost.push_back(rng.range(0.0, 1.0));
        }
        Thresholds th;
        try {
          th = beta_thresholds(params, settings);
        } catch (const AssumptionViolated&) {
          return true;
        }
        params.beta = th.beta_bar + rng.range(0.2, 2.0);
        const EquilibriumResult res = solve(params, settings);
        if (res.status != SolveStatus::verified ||
            res.entry != full_set(params.K)) {
          *ce = describe({params, res.noise}, "sufficient regime not verified");
          return false;
        }
        if (std::fabs(res.outcome.u_user) > 1e-9) {
          *ce = describe({params, res.noise}, "user utility not zero");
          return false;
        }
        const double border =
            static_cast<double>(params.K) / (2.0 * params.alpha);
        if (std::fabs(res.outcome.info_to_buyer - border) > 1e-9) {
          *ce = describe({params, res.noise}, "border identity violated");
          return false;
        }
        if (params.K >= 2 && !(res.outcome.u_buyer > 0.0)) {
          *ce = describe({params, res.noise}, "buyer surplus not positive");
          return false;
        }
        double formula = params.K * (0.5 + params.beta / (2.0 * params.alpha));
        for (const double c : params.cost) formula -= c;
        if (std::fabs(welfare(res.outcome, params) - formula) > 1e-9) {
          *ce = describe({params, res.noise}, "welfare formula mismatch");
          return false;
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "equilibrium-threshold-consistency", next_seed(), slow_trials,
      [&settings](Rng& rng, std::string* ce) {
        // K = 2: the all-enter candidate is accepted exactly when alpha and
        // beta clear their thresholds (guard band excludes knife edges).
        MarketParams params;
        params.K = 2;
        params.gamma = {1.0, 1.0};
        params.cost = {rng.range(0.5, 0.8), rng.range(0.8, 1.1)};
        const double sharp = alpha_bar_sharp(2);
        params.alpha = rng.chance(0.5) ? rng.range(1.55, sharp - 0.02)
                                       : rng.range(sharp + 0.02, 4.0);
        Thresholds th;
        try {
          th = beta_thresholds(params, settings);
        } catch (const AssumptionViolated&) {
          return true;
        }
        params.beta = rng.chance(0.5)
                          ? rng.range(0.0, std::max(0.0, th.beta_bar - 0.05))
                          : th.beta_bar + rng.range(0.05, 2.0);
        const NoiseProfile cand = candidate_profile(params, full_set(2));
        const VerificationCertificate cert =
            verify_equilibrium(params, cand, full_set(2), settings);
        const bool expect = params.alpha >= sharp &&
                            params.beta >= th.beta_bar - settings.gain_tol;
        if (cert.verified(settings.gain_tol) == expect) return true;
        std::ostringstream os;
        os << "expected verified=" << expect << " beta_bar=" << th.beta_bar
           << " sharp=" << sharp;
        *ce = describe({params, cand}, os.str());
        return false;
      }));

  report.suites.push_back(run_check(
      "equilibrium-necessary-bound-rejection", next_seed(), slow_trials,
      [&settings](Rng& rng, std::string* ce) {
        // Below the necessary bound beta >= 2 alpha (max c - 1/2), the
        // all-enter candidate always fails.
        MarketParams params;
        params.K = rng.integer(2, 4);
        params.alpha = rng.range(2.0, 6.0);
        double max_cost = 0.0;
        for (int i = 0; i < params.K; ++i) {
          params.gamma.push_back(1.0);
          params.cost.push_back(rng.range(0.6, 1.2));
          max_cost = std::max(max_cost, params.cost.back());
        }
        const double necessary = 2.0 * params.alpha * (max_cost - 0.5);
        params.beta = rng.range(0.0, 0.95 * necessary);
        NoiseProfile cand;
        try {
          cand = candidate_profile(params, full_set(params.K));
        } catch (const InfeasibleCandidate&) {
          return true;
        }
        const VerificationCertificate cert = verify_equilibrium(
            params, cand, full_set(params.K), settings);
        if (!cert.verified(settings.gain_tol)) return true;
        *ce = describe({params, cand},
                       "candidate accepted below the necessary beta bound");
        return false;
      }));

  report.suites.push_back(run_check(
      "equilibrium-entry-monotonicity", next_seed(), solve_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = 3;
        params.alpha = rng.range(4.0, 7.0);
        params.gamma = {1.0, 1.0, 1.0};
        params.cost = {rng.range(0.0, 0.45), rng.range(0.55, 0.8),
                       rng.range(0.85, 1.1)};
        try {
          beta_thresholds(params, settings);
        } catch (const AssumptionViolated&) {
          return true;
        }
        PlatformSet prev = 0;
        bool have_prev = false;
        for (int step = 0; step <= 10; ++step) {
          params.beta = 0.8 * static_cast<double>(step);
          const EquilibriumResult res = solve(params, settings);
          if (res.status != SolveStatus::verified) continue;
          if (have_prev && (prev & ~res.entry)) {
            *ce = describe({params, res.noise},
                           "verified entrant set shrank along beta");
            return false;
          }
          prev = res.entry;
          have_prev = true;
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "equilibrium-welfare-monotonicity", next_seed(), solve_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = rng.integer(2, 3);
        params.alpha = alpha_bar_sharp(params.K) + rng.range(0.5, 1.5);
        for (int i = 0; i < params.K; ++i) {
          params.gamma.push_back(1.0);
          params.cost.push_back(rng.range(0.3, 0.9));
        }
        Thresholds th;
        try {
          th = beta_thresholds(params, settings);
        } catch (const AssumptionViolated&) {
          return true;
        }
        params.beta = th.beta_bar + 1.0;
        const EquilibriumResult base = solve(params, settings);
        MarketParams more_beta = params;
        more_beta.beta += 0.5;
        const EquilibriumResult richer = solve(more_beta, settings);
        MarketParams more_alpha = params;
        more_alpha.alpha += 0.5;
        const EquilibriumResult warier = solve(more_alpha, settings);
        if (base.status != SolveStatus::verified ||
            richer.status != SolveStatus::verified)
          return true;
        if (welfare(richer.outcome, more_beta) <
            welfare(base.outcome, params) - 1e-9) {
          *ce = describe({params, base.noise}, "welfare fell as beta rose");
          return false;
        }
        if (warier.status == SolveStatus::verified &&
            welfare(warier.outcome, more_alpha) >
                welfare(base.outcome, params) + 1e-9) {
          *ce = describe({params, base.noise}, "welfare rose as alpha rose");
          return false;
        }
        return true;
      }));

  // --- regulation ----------------------------------------------------------

  report.suites.push_back(run_check(
      "regulation-ban-exactness", next_seed(), slow_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = rng.integer(1, 4);
        params.alpha = rng.range(1.0, 6.0);
        params.beta = rng.range(0.0, 6.0);
        int low = 0;
        for (int i = 0; i < params.K; ++i) {
          params.gamma.push_back(rng.range(0.2, 1.0));
          params.cost.push_back(rng.range(0.0, 1.2));
          if (params.low_cost(i)) ++low;
        }
        const EquilibriumResult res = solve_with_policy(
            params, RegulationPolicy::ban_all(params.K), settings);
        if (res.outcome.u_user != 0.5 * low ||
            res.outcome.info_to_buyer != 0.0) {
          *ce = describe({params, res.noise}, "ban outcome not exact");
          return false;
        }
        for (int i = 0; i < params.K; ++i) {
          if (contains(res.entry, i) != params.low_cost(i)) {
            *ce = describe({params, res.noise}, "ban entry set wrong");
            return false;
          }
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "regulation-dominance-chain", next_seed(), solve_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = rng.integer(2, 3);
        params.alpha = alpha_bar_sharp(params.K) + rng.range(0.5, 1.5);
        params.gamma.assign(static_cast<std::size_t>(params.K), 1.0);
        params.cost.assign(static_cast<std::size_t>(params.K), 0.0);
        params.cost[0] = rng.range(0.1, 0.45);
        for (int i = 1; i < params.K; ++i)
          params.cost[static_cast<std::size_t>(i)] = rng.range(0.6, 0.9);
        const double sigma_bar = std::sqrt(rng.range(15.0, 40.0));
        double beta_hat = 0.0;
        try {
          beta_hat = mandate_entry_threshold(params, sigma_bar, settings);
        } catch (const Error&) {
          return true;
        }
        params.beta = beta_hat * 1.1 + 1.0;
        std::vector<double> bounds(static_cast<std::size_t>(params.K),
                                   sigma_bar);
        for (int i = 0; i < params.K; ++i)
          if (params.low_cost(i))
            bounds[static_cast<std::size_t>(i)] = kInfiniteNoise;
        const EquilibriumResult uni = solve_with_policy(
            params, RegulationPolicy::uniform(params.K, sigma_bar), settings);
        const EquilibriumResult nonuni = solve_with_policy(
            params, RegulationPolicy::nonuniform(bounds), settings);
        if (uni.entry != full_set(params.K) ||
            nonuni.entry != full_set(params.K)) {
          *ce = describe({params, uni.noise}, "entry differs under mandates");
          return false;
        }
        if (nonuni.outcome.u_user < uni.outcome.u_user - 1e-9 ||
            uni.outcome.u_user < -1e-9) {
          *ce = describe({params, uni.noise}, "dominance chain violated");
          return false;
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "regulation-policy-monotonicity", next_seed(), solve_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = 2;
        params.alpha = rng.range(2.5, 5.0);
        params.gamma = {1.0, 1.0};
        params.cost = {rng.range(0.0, 0.4), rng.range(0.55, 0.8)};
        params.beta = rng.range(8.0, 20.0);
        double prev_u = -kInf;
        int prev_entry = params.K + 1;
        for (const double sb_sq : {6.0, 12.0, 25.0, 50.0, 100.0}) {
          const EquilibriumResult res = solve_with_policy(
              params, RegulationPolicy::uniform(params.K, std::sqrt(sb_sq)),
              settings);
          const int entries = set_size(res.entry);
          if (entries > prev_entry) {
            *ce = describe({params, res.noise},
                           "entry set grew as the mandate tightened");
            return false;
          }
          if (entries == prev_entry && res.outcome.u_user < prev_u - 1e-9) {
            *ce = describe({params, res.noise},
                           "user utility fell as the mandate tightened");
            return false;
          }
          prev_u = res.outcome.u_user;
          prev_entry = entries;
        }
        return true;
      }));

  report.suites.push_back(run_check(
      "regulation-none-consistency", next_seed(), solve_trials,
      [&settings](Rng& rng, std::string* ce) {
        MarketParams params;
        params.K = rng.integer(1, 3);
        params.alpha = rng.range(1.0, 5.0);
        params.beta = rng.range(0.0, 6.0);
        for (int i = 0; i < params.K; ++i) {
          params.gamma.push_back(rng.range(0.3, 1.0));
          params.cost.push_back(rng.range(0.0, 1.0));
        }
        const EquilibriumResult direct = solve(params, settings);
        const EquilibriumResult via_policy = solve_with_policy(
            params, RegulationPolicy::none(params.K), settings);
        const bool same =
            direct.entry == via_policy.entry &&
            direct.sharing == via_policy.sharing &&
            direct.noise.sigma == via_policy.noise.sigma &&
            direct.prices.p == via_policy.prices.p &&
            direct.outcome.u_user == via_policy.outcome.u_user &&
            direct.outcome.u_buyer == via_policy.outcome.u_buyer &&
            direct.status == via_policy.status;
        if (same) return true;
        *ce = describe({params, direct.noise},
                       "policy=none diverged from the plain solve");
        return false;
      }));

  return report;
}

}  // namespace datamarket
