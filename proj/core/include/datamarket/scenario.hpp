#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "datamarket/regulation.hpp"

namespace datamarket {

/// A solvable problem instance as stored on disk: market parameters, an
/// optional regulation policy, and solver settings. Parsing is strict;
/// unknown fields are rejected.
struct Scenario {
  MarketParams market;
  std::optional<RegulationPolicy> policy;
  SolverSettings settings;
};

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

/// Structured solve report, serialized as JSON. Exit codes follow the
/// solve status: 0 verified, 2 candidate only, 3 no equilibrium found.
std::string report_to_json(const Scenario& scenario,
                           const EquilibriumResult& result,
                           const std::optional<Thresholds>& thresholds);

int exit_code(SolveStatus status);

/// Strategy tuple read back from a report, for round-trip checks.
struct ParsedReport {
  NoiseProfile noise;
  PlatformSet entry = 0;
  PlatformSet sharing = 0;
  PlatformSet buyer = 0;
  PriceVector prices;
  double u_user = 0.0;
  std::vector<double> u_platforms;
  double u_buyer = 0.0;
  double welfare_value = 0.0;
  double info_to_buyer = 0.0;
  std::string status;
};

ParsedReport parse_report(std::string_view json_text);

/// Axis ranges (in sigma^2) and per-axis resolutions for the K = 2 region
/// map, at a fixed entry set.
struct RegionGridSpec {
  double sigma1_lo = 0.0, sigma1_hi = 0.0;
  int sigma1_n = 2;
  double sigma2_lo = 0.0, sigma2_hi = 0.0;
  int sigma2_n = 2;
  PlatformSet entry = full_set(2);

  void validate() const;
};

/// One CSV row per grid point: sigma1_sq, sigma2_sq, a1, a2. Rows are emitted
/// in row-major order regardless of evaluation order. Throws InvalidParams
/// for K != 2.
std::string region_grid_csv(const Scenario& scenario,
                            const RegionGridSpec& spec);

/// One CSV row per beta: entrant set, utilities, welfare and status, with
/// the analytic entry thresholds as leading comment lines.
std::string beta_sweep_csv(const Scenario& scenario, double beta_lo,
                           double beta_hi, int steps);

/// Regulation policy file (JSON), strict like scenarios.
RegulationPolicy parse_policy(std::string_view json_text, int k);
RegulationPolicy load_policy_file(const std::string& path, int k);

}  // namespace datamarket
