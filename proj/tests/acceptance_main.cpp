// Acceptance suite: exercises the headline results end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "datamarket/property_suite.hpp"
#include "datamarket/regulation.hpp"
#include "datamarket/scenario.hpp"

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

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

bool criterion_alpha_bar(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  const double a2 = alpha_bar(2);
  os << "alpha_bar(2)=" << a2;
  ok &= std::fabs(a2 - 1.884) <= 1e-3;
  for (int k = 3; k <= 8; ++k) {
    const double expected = (k + 1.0) * (k + 1.0) / 8.0;
    if (alpha_bar(k) != expected) {
      os << " alpha_bar(" << k << ") != " << expected;
      ok = false;
    }
  }
  detail = os.str();
  return ok;
}

bool criterion_k2_equilibrium(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  const MarketParams p = make({1.0, 1.0}, 2.0, 3.0, {0.6, 1.0});
  const EquilibriumResult r = solve(p);
  ok &= r.status == SolveStatus::verified;
  ok &= r.entry == full_set(2);
  ok &= close(r.noise.sigma_sq(0), 1.0, 1e-9);
  ok &= close(r.noise.sigma_sq(1), 1.0, 1e-9);
  ok &= close(r.outcome.info_to_buyer, 0.5, 1e-9);
  ok &= std::fabs(r.outcome.u_user) <= 1e-9;
  ok &= r.outcome.u_buyer > 0.0;
  os << "sigma_sq=(" << r.noise.sigma_sq(0) << "," << r.noise.sigma_sq(1)
     << ") info=" << r.outcome.info_to_buyer << " u_user=" << r.outcome.u_user
     << " u_buyer=" << r.outcome.u_buyer << " status=" << to_string(r.status);

  MarketParams low_alpha = p;
  low_alpha.alpha = 1.6;
  const NoiseProfile cand = candidate_profile(low_alpha, full_set(2));
  const auto cert = verify_equilibrium(low_alpha, cand, full_set(2));
  double worst = 0.0;
  for (const auto& d : cert.noise_deviations) worst = std::max(worst, d.gain);
  ok &= !cert.verified(1e-7);
  ok &= worst > 1e-7;
  os << "; alpha=1.6 rejected with gain " << worst;
  detail = os.str();
  return ok;
}

bool criterion_k1_closed_forms(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  {
    const MarketParams p = make({1.0}, 0.8, 0.0, {0.4});
    const EquilibriumResult r = solve(p);
    ok &= r.status == SolveStatus::verified && r.entry == full_set(1);
    ok &= close(r.noise.sigma[0], 0.0, 1e-9);
    ok &= close(r.outcome.u_user, 0.1, 1e-9);
    ok &= close(r.outcome.u_buyer, 0.0, 1e-9);
    os << "low-alpha: sigma=" << r.noise.sigma[0]
       << " u_user=" << r.outcome.u_user;
  }
  {
    const MarketParams p = make({1.0}, 2.0, 1.0, {0.6});
    const EquilibriumResult r = solve(p);
    ok &= r.status == SolveStatus::verified && r.entry == full_set(1);
    ok &= close(r.noise.sigma[0], std::sqrt(2.0), 1e-9);
    ok &= close(r.outcome.u_user, 0.0, 1e-9);
    ok &= close(r.outcome.u_buyer, 0.0, 1e-9);
    os << "; high-alpha: sigma=" << r.noise.sigma[0];
  }
  detail = os.str();
  return ok;
}

bool criterion_property_suites(std::string& detail) {
  const PropertyReport report = run_property_suite(42, 10000);
  std::ostringstream os;
  int failures = 0;
  for (const auto& s : report.suites) {
    if (!s.passed) {
      ++failures;
      os << " FAIL:" << s.name << " (" << s.counterexample << ")";
    }
  }
  std::ostringstream head;
  head << report.suites.size() << " suites, " << failures << " failures"
       << os.str();
  detail = head.str();
  return report.all_passed();
}

struct SweepPoint {
  double beta;
  EquilibriumResult result;
};

std::vector<SweepPoint> entry_sweep() {
  std::vector<SweepPoint> points;
  MarketParams p = make({1.0, 1.0, 1.0}, 4.0, 0.0, {0.3, 0.75, 1.0});
  const int steps = 400;
  for (int k = 0; k < steps; ++k) {
    p.beta = 8.0 * static_cast<double>(k) / (steps - 1);
    points.push_back({p.beta, solve(p)});
  }
  return points;
}

bool criterion_entry_sequence(const std::vector<SweepPoint>& sweep,
                              std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  const double grid_step = 8.0 / 399.0;
  double first_two = -1.0, first_three = -1.0;
  for (const auto& pt : sweep) {
    const int n = set_size(pt.result.entry);
    if (n >= 2 && first_two < 0.0) first_two = pt.beta;
    if (n >= 3 && first_three < 0.0) first_three = pt.beta;
  }
  const double beta2 = 2.0 * 4.0 * 7.0 / 6.0 * 0.25;  // 2.3333
  const double beta3 = 2.0 * 4.0 * 7.0 / 5.0 * 0.5;   // 5.6
  ok &= first_two >= 0.0 && std::fabs(first_two - beta2) <= grid_step + 1e-12;
  ok &= first_three >= 0.0 &&
        std::fabs(first_three - beta3) <= grid_step + 1e-12;
  os << "transitions at " << first_two << " (ref " << beta2 << ") and "
     << first_three << " (ref " << beta3 << ")";

  // Every verified high-cost entrant satisfies beta >= 2 alpha (c - 1/2).
  MarketParams p = make({1.0, 1.0, 1.0}, 4.0, 0.0, {0.3, 0.75, 1.0});
  for (const auto& pt : sweep) {
    if (pt.result.status != SolveStatus::verified) continue;
    for (const int i : set_members(pt.result.entry, p.K)) {
      const double c = p.cost[static_cast<std::size_t>(i)];
      if (c > 0.5 && pt.beta < 2.0 * p.alpha * (c - 0.5) - 1e-9) {
        os << "; lower bound violated at beta=" << pt.beta;
        ok = false;
      }
    }
  }
  detail = os.str();
  return ok;
}

bool criterion_welfare(const std::vector<SweepPoint>& sweep,
                       std::string& detail) {
  const MarketParams p = make({1.0, 1.0, 1.0}, 4.0, 0.0, {0.3, 0.75, 1.0});
  int checked = 0;
  bool ok = true;
  double worst = 0.0;
  for (const auto& pt : sweep) {
    if (pt.result.status != SolveStatus::verified) continue;
    if (pt.result.entry != full_set(3)) continue;
    const double formula =
        3.0 * (0.5 + pt.beta / (2.0 * p.alpha)) - (0.3 + 0.75 + 1.0);
    const double err = std::fabs(welfare(pt.result.outcome, p) - formula);
    worst = std::max(worst, err);
    if (err > 1e-9) ok = false;
    ++checked;
  }
  std::ostringstream os;
  os << checked << " all-enter equilibria, max |welfare - formula| = " << worst;
  detail = os.str();
  return ok && checked > 0;
}

bool criterion_region_grid(std::string& detail) {
  const MarketParams p = make({0.8, 0.7}, 2.5, 1.0, {0.0, 0.0});
  auto label = [&](double s1_sq, double s2_sq) {
    return region_of(p, NoiseProfile{{std::sqrt(s1_sq), std::sqrt(s2_sq)}},
                     full_set(2));
  };
  auto grid_labels = [&](int n) {
    std::vector<PlatformSet> labels;
    labels.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        labels.push_back(label(30.0 * i / (n - 1), 30.0 * j / (n - 1)));
    return labels;
  };

  bool ok = true;
  std::ostringstream os;
  const int n = 41;
  const auto labels = grid_labels(n);
  ok &= labels.front() == 0;                      // origin: no sharing
  ok &= labels.back() == full_set(2);             // far corner: share with all
  int count10 = 0, count01 = 0;
  for (const auto l : labels) {
    if (l == platform_bit(0)) ++count10;
    if (l == platform_bit(1)) ++count01;
  }
  ok &= count10 > 0 && count01 > 0;
  os << "region counts at " << n << "x" << n << ": 10-only=" << count10
     << " 01-only=" << count01;

  // Doubling the resolution keeps every shared grid point's label.
  const auto fine = grid_labels(2 * n - 1);
  for (int i = 0; i < n && ok; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto coarse = labels[static_cast<std::size_t>(i * n + j)];
      const auto refined = fine[static_cast<std::size_t>(
          (2 * i) * (2 * n - 1) + 2 * j)];
      if (coarse != refined) {
        os << "; label mismatch at (" << i << "," << j << ")";
        ok = false;
        break;
      }
    }
  }
  detail = os.str();
  return ok;
}

bool criterion_regulation(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  {
    const MarketParams p = make({1.0, 1.0, 1.0}, 4.0, 2.0, {0.1, 0.2, 0.3});
    const auto cmp = compare_ban_vs_uniform(p, default_sigma_bar_grid());
    ok &= cmp.best_index == 0;
    ok &= cmp.evaluations[0].user_utility == 1.5;  // K/2 exactly
    os << "all-low-cost: ban u=" << cmp.evaluations[0].user_utility;
  }
  {
    const MarketParams p = make({1.0, 1.0}, 3.0, 12.0, {0.4, 0.9});
    const double sb = std::sqrt(20.0);
    const double beta_tilde = mandate_entry_threshold(p, sb);
    ok &= p.beta >= beta_tilde;
    const auto ban = solve_with_policy(p, RegulationPolicy::ban_all(2));
    const auto uni = solve_with_policy(p, RegulationPolicy::uniform(2, sb));
    const auto non = solve_with_policy(
        p, RegulationPolicy::nonuniform({kInfiniteNoise, sb}));
    ok &= uni.outcome.u_user > ban.outcome.u_user;
    const double gain = non.outcome.u_user - uni.outcome.u_user;
    const NoiseProfile mandated = NoiseProfile::uniform(2, sb);
    const double predicted =
        p.alpha * (revealed_info(p, mandated, full_set(2)) -
                   revealed_info(p, mandated, platform_bit(1)));
    ok &= std::fabs(gain - 0.124) <= 1e-3;
    ok &= std::fabs(gain - predicted) <= 1e-9;
    os << "; mixed: ban=" << ban.outcome.u_user
       << " uniform=" << uni.outcome.u_user << " nonuniform gain=" << gain
       << " (predicted " << predicted << ", beta_tilde=" << beta_tilde << ")";
  }
  detail = os.str();
  return ok;
}

bool criterion_nonlinear(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  MarketParams p = make({1.0, 1.0, 1.0}, 8.0, 40.0, {0.3, 0.75, 1.0});
  p.h_user = UtilityShape::log1p_normalized();
  p.h_buyer = UtilityShape::log1p_normalized();
  const EquilibriumResult r = solve(p);
  ok &= r.status == SolveStatus::verified;
  ok &= r.entry == full_set(3);
  ok &= std::fabs(r.outcome.u_user) <= 1e-7;
  ok &= r.outcome.u_buyer > 0.0;
  os << "log-shape: status=" << to_string(r.status)
     << " u_user=" << r.outcome.u_user << " u_buyer=" << r.outcome.u_buyer;

  // Identity shapes must reproduce the linear pipeline bit for bit.
  const MarketParams lin = make({1.0, 1.0}, 2.0, 3.0, {0.6, 1.0});
  const NoiseProfile noise{{1.0, 1.0}};
  const PriceVector prices =
      equilibrium_prices(lin, noise, full_set(2), full_set(2));
  const StageOutcome out = stage_utilities(lin, noise, full_set(2),
                                           full_set(2), prices, full_set(2));
  const double info = revealed_info(lin, noise, full_set(2));
  const double linear_user = 0.5 * 2 - lin.alpha * info;
  const double linear_buyer =
      lin.beta * info - prices.p[0] - prices.p[1];
  ok &= out.u_user == linear_user;
  ok &= out.u_buyer == linear_buyer;
  os << "; identity bitwise match=" << (ok ? "yes" : "no");
  detail = os.str();
  return ok;
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&failures](int id, const std::string& summary, bool ok,
                         const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", id,
                summary.c_str(), detail.c_str());
    if (!ok) ++failures;
  };

  std::string d;
  bool ok;

  ok = criterion_alpha_bar(d);
  run(1, "alpha-bar values", ok, d);

  ok = criterion_k2_equilibrium(d);
  run(2, "K=2 all-enter equilibrium and its alpha threshold", ok, d);

  ok = criterion_k1_closed_forms(d);
  run(3, "K=1 closed forms", ok, d);

  ok = criterion_property_suites(d);
  run(4, "randomized property suites (seed 42, 10^4 trials)", ok, d);

  const auto sweep = entry_sweep();
  ok = criterion_entry_sequence(sweep, d);
  run(5, "entry-sequence sweep thresholds", ok, d);

  ok = criterion_welfare(sweep, d);
  run(6, "welfare closed form at all-enter equilibria", ok, d);

  ok = criterion_region_grid(d);
  run(7, "four-region structure of the K=2 noise map", ok, d);

  ok = criterion_regulation(d);
  run(8, "regulation comparisons", ok, d);

  ok = criterion_nonlinear(d);
  run(9, "nonlinear utility shapes", ok, d);

  if (failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
