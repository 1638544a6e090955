// Command-line front end for the three-layer data-market solver.
//
// Subcommands:
//   solve <scenario>                          equilibrium report (JSON)
//   region-grid <scenario> --sigma1 lo:hi:n --sigma2 lo:hi:n   CSV region map
//   beta-sweep <scenario> --beta lo:hi:n      CSV sweep over buyer valuations
//   regulate <scenario> --policy <file>       solve under a policy file
//   properties --seed S --trials N            randomized invariant suites
//
// Exit codes: 0 success/verified, 1 property-suite failure, 2 candidate only,
// 3 no equilibrium found, 4 validation or I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "datamarket/property_suite.hpp"
#include "datamarket/scenario.hpp"

namespace {

using namespace datamarket;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

Range parse_range(const std::string& text, const std::string& flag) {
  Range r;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw InvalidParams(flag + " must look like lo:hi:n");
  try {
    r.lo = std::stod(text.substr(0, c1));
    r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.n = std::stoi(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw InvalidParams(flag + " must look like lo:hi:n");
  }
  return r;
}

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return 4;
  }
  out << text;
  return 0;
}

std::optional<Thresholds> try_thresholds(const Scenario& scenario) {
  try {
    return beta_thresholds(scenario.market, scenario.settings);
  } catch (const Error&) {
    return std::nullopt;
  }
}

int run_solve(const std::string& scenario_path, const std::string& out_path) {
  const Scenario scenario = load_scenario_file(scenario_path);
  EquilibriumResult result;
  if (scenario.policy)
    result = solve_with_policy(scenario.market, *scenario.policy,
                               scenario.settings);
  else
    result = solve(scenario.market, scenario.settings);
  const std::string report =
      report_to_json(scenario, result, try_thresholds(scenario));
  const int io = write_output(report, out_path);
  return io != 0 ? io : exit_code(result.status);
}

int run_region_grid(const std::string& scenario_path, const std::string& s1,
                    const std::string& s2, const std::string& out_path) {
  const Scenario scenario = load_scenario_file(scenario_path);
  const Range r1 = parse_range(s1, "--sigma1");
  const Range r2 = parse_range(s2, "--sigma2");
  RegionGridSpec spec;
  spec.sigma1_lo = r1.lo;
  spec.sigma1_hi = r1.hi;
  spec.sigma1_n = r1.n;
  spec.sigma2_lo = r2.lo;
  spec.sigma2_hi = r2.hi;
  spec.sigma2_n = r2.n;
  return write_output(region_grid_csv(scenario, spec), out_path);
}

int run_beta_sweep(const std::string& scenario_path, const std::string& range,
                   const std::string& out_path) {
  const Scenario scenario = load_scenario_file(scenario_path);
  const Range r = parse_range(range, "--beta");
  return write_output(beta_sweep_csv(scenario, r.lo, r.hi, r.n), out_path);
}

int run_regulate(const std::string& scenario_path,
                 const std::string& policy_path, const std::string& out_path) {
  Scenario scenario = load_scenario_file(scenario_path);
  scenario.policy = load_policy_file(policy_path, scenario.market.K);
  const EquilibriumResult result =
      solve_with_policy(scenario.market, *scenario.policy, scenario.settings);
  const std::string report =
      report_to_json(scenario, result, try_thresholds(scenario));
  const int io = write_output(report, out_path);
  return io != 0 ? io : exit_code(result.status);
}

int run_properties(std::uint64_t seed, int trials,
                   const std::string& out_path) {
  const PropertyReport report = run_property_suite(seed, trials);
  const int io = write_output(report.to_text(), out_path);
  if (io != 0) return io;
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-layer data market equilibrium solver"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, policy_path;
  std::string sigma1_range, sigma2_range, beta_range;
  std::uint64_t seed = 42;
  int trials = 10000;

  auto* solve_cmd = app.add_subcommand("solve", "solve a scenario file");
  solve_cmd->add_option("scenario", scenario_path)->required();
  solve_cmd->add_option("--out", out_path, "write the report to a file");

  auto* grid_cmd =
      app.add_subcommand("region-grid", "K=2 sharing-region map over noise");
  grid_cmd->add_option("scenario", scenario_path)->required();
  grid_cmd->add_option("--sigma1", sigma1_range, "sigma1^2 range lo:hi:n")
      ->required();
  grid_cmd->add_option("--sigma2", sigma2_range, "sigma2^2 range lo:hi:n")
      ->required();
  grid_cmd->add_option("--out", out_path);

  auto* sweep_cmd =
      app.add_subcommand("beta-sweep", "solve across buyer valuations");
  sweep_cmd->add_option("scenario", scenario_path)->required();
  sweep_cmd->add_option("--beta", beta_range, "beta range lo:hi:n")->required();
  sweep_cmd->add_option("--out", out_path);

  auto* reg_cmd =
      app.add_subcommand("regulate", "solve under a privacy-mandate policy");
  reg_cmd->add_option("scenario", scenario_path)->required();
  reg_cmd->add_option("--policy", policy_path, "policy file (JSON)")
      ->required();
  reg_cmd->add_option("--out", out_path);

  auto* prop_cmd =
      app.add_subcommand("properties", "run the randomized invariant suites");
  prop_cmd->add_option("--seed", seed);
  prop_cmd->add_option("--trials", trials);
  prop_cmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(scenario_path, out_path);
    if (grid_cmd->parsed())
      return run_region_grid(scenario_path, sigma1_range, sigma2_range,
                             out_path);
    if (sweep_cmd->parsed())
      return run_beta_sweep(scenario_path, beta_range, out_path);
    if (reg_cmd->parsed())
      return run_regulate(scenario_path, policy_path, out_path);
    if (prop_cmd->parsed()) return run_properties(seed, trials, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 4;
}
