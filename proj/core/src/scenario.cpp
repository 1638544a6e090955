#include "datamarket/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace datamarket {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InvalidParams(where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) fail(where, "unknown field '" + key + "'");
  }
}

double number_or_inf(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v == "inf" || v == "+inf" || v == "infinity"))
    return kInfiniteNoise;
  fail(where, "expected a number or \"inf\"");
}

std::vector<double> number_vector(const json& v, const std::string& where,
                                  bool allow_inf) {
  if (!v.is_array()) fail(where, "expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& item : v)
    out.push_back(allow_inf ? number_or_inf(item, where)
                            : item.is_number()
                                  ? item.get<double>()
                                  : (fail(where, "expected numbers"), 0.0));
  return out;
}

json inf_aware(double x) {
  if (std::isinf(x)) return json(x > 0 ? "inf" : "-inf");
  return json(x);
}

UtilityShape parse_shape(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
  reject_unknown(v, where, {"kind", "values"});
  const std::string kind = v.value("kind", "");
  if (kind == "identity") return UtilityShape::identity();
  if (kind == "log1p_normalized") return UtilityShape::log1p_normalized();
  if (kind == "table") {
    if (!v.contains("values")) fail(where, "table shape needs 'values'");
    return UtilityShape::table(number_vector(v["values"], where, false));
  }
  fail(where, "kind must be identity, log1p_normalized or table");
}

json shape_to_json(const UtilityShape& s) {
  json out;
  switch (s.kind()) {
    case ShapeKind::identity:
      out["kind"] = "identity";
      break;
    case ShapeKind::log1p_normalized:
      out["kind"] = "log1p_normalized";
      break;
    case ShapeKind::table:
      out["kind"] = "table";
      out["values"] = s.table_values();
      break;
  }
  return out;
}

MarketParams parse_market(const json& v) {
  if (!v.is_object()) fail("market", "expected an object");
  reject_unknown(v, "market",
                 {"K", "alpha", "beta", "gamma", "cost", "h_user", "h_buyer"});
  MarketParams m;
  if (!v.contains("K") || !v["K"].is_number_integer())
    fail("market.K", "required integer");
  m.K = v["K"].get<int>();
  if (!v.contains("alpha") || !v["alpha"].is_number())
    fail("market.alpha", "required number");
  m.alpha = v["alpha"].get<double>();
  if (!v.contains("beta") || !v["beta"].is_number())
    fail("market.beta", "required number");
  m.beta = v["beta"].get<double>();
  if (!v.contains("gamma")) fail("market.gamma", "required array");
  m.gamma = number_vector(v["gamma"], "market.gamma", false);
  if (!v.contains("cost")) fail("market.cost", "required array");
  m.cost = number_vector(v["cost"], "market.cost", false);
  if (v.contains("h_user")) m.h_user = parse_shape(v["h_user"], "market.h_user");
  if (v.contains("h_buyer"))
    m.h_buyer = parse_shape(v["h_buyer"], "market.h_buyer");
  m.validate();
  return m;
}

RegulationPolicy parse_policy_json(const json& v, int k) {
  if (!v.is_object()) fail("policy", "expected an object");
  reject_unknown(v, "policy", {"kind", "sigma_bar", "sigma_lower"});
  const std::string kind = v.value("kind", "");
  RegulationPolicy p;
  if (kind == "none") {
    p = RegulationPolicy::none(k);
  } else if (kind == "ban_all") {
    p = RegulationPolicy::ban_all(k);
  } else if (kind == "uniform") {
    if (!v.contains("sigma_bar") || !v["sigma_bar"].is_number())
      fail("policy.sigma_bar", "required number for uniform policies");
    p = RegulationPolicy::uniform(k, v["sigma_bar"].get<double>());
  } else if (kind == "nonuniform") {
    if (!v.contains("sigma_lower"))
      fail("policy.sigma_lower", "required array for nonuniform policies");
    p = RegulationPolicy::nonuniform(
        number_vector(v["sigma_lower"], "policy.sigma_lower", true));
  } else {
    fail("policy.kind", "must be none, uniform, ban_all or nonuniform");
  }
  p.validate(k);
  return p;
}

SolverSettings parse_settings(const json& v) {
  SolverSettings s;
  if (!v.is_object()) fail("settings", "expected an object");
  reject_unknown(v, "settings",
                 {"lin_tol", "tie_tol", "gain_tol", "exhaustive_limit",
                  "sweep_points", "sweep_t_floor", "refine_step",
                  "refine_window", "policy_grid_points", "policy_grid_lo",
                  "policy_grid_hi", "mandate_beta_cap", "seed", "trials"});
  auto num = [&](const char* key, double& out) {
    if (v.contains(key)) out = v[key].get<double>();
  };
  auto integer = [&](const char* key, int& out) {
    if (v.contains(key)) out = v[key].get<int>();
  };
  num("lin_tol", s.lin_tol);
  num("tie_tol", s.tie_tol);
  num("gain_tol", s.gain_tol);
  integer("exhaustive_limit", s.exhaustive_limit);
  integer("sweep_points", s.sweep_points);
  num("sweep_t_floor", s.sweep_t_floor);
  num("refine_step", s.refine_step);
  integer("refine_window", s.refine_window);
  integer("policy_grid_points", s.policy_grid_points);
  num("policy_grid_lo", s.policy_grid_lo);
  num("policy_grid_hi", s.policy_grid_hi);
  num("mandate_beta_cap", s.mandate_beta_cap);
  if (v.contains("seed")) s.seed = v["seed"].get<std::uint64_t>();
  integer("trials", s.trials);
  return s;
}

std::string fmt17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json mask_to_array(PlatformSet s, int k) {
  json out = json::array();
  for (const int i : set_members(s, k)) out.push_back(i);
  return out;
}

PlatformSet mask_from_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of indices");
  PlatformSet s = 0;
  for (const auto& item : v) s |= platform_bit(item.get<int>());
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("scenario", "expected a JSON object");
  reject_unknown(root, "scenario", {"market", "policy", "settings"});
  if (!root.contains("market")) fail("scenario", "missing 'market'");
  Scenario sc;
  sc.market = parse_market(root["market"]);
  if (root.contains("settings")) sc.settings = parse_settings(root["settings"]);
  if (root.contains("policy"))
    sc.policy = parse_policy_json(root["policy"], sc.market.K);
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& scenario) {
  json root;
  json market;
  market["K"] = scenario.market.K;
  market["alpha"] = scenario.market.alpha;
  market["beta"] = scenario.market.beta;
  market["gamma"] = scenario.market.gamma;
  market["cost"] = scenario.market.cost;
  market["h_user"] = shape_to_json(scenario.market.h_user);
  market["h_buyer"] = shape_to_json(scenario.market.h_buyer);
  root["market"] = market;
  if (scenario.policy) {
    json p;
    p["kind"] = to_string(scenario.policy->kind);
    if (scenario.policy->kind == RegulationPolicy::Kind::uniform)
      p["sigma_bar"] = scenario.policy->sigma_lower.front();
    else if (scenario.policy->kind == RegulationPolicy::Kind::nonuniform) {
      json bounds = json::array();
      for (const double b : scenario.policy->sigma_lower)
        bounds.push_back(inf_aware(b));
      p["sigma_lower"] = bounds;
    }
    root["policy"] = p;
  }
  json s;
  const SolverSettings d{};
  const SolverSettings& v = scenario.settings;
  if (v.lin_tol != d.lin_tol) s["lin_tol"] = v.lin_tol;
  if (v.tie_tol != d.tie_tol) s["tie_tol"] = v.tie_tol;
  if (v.gain_tol != d.gain_tol) s["gain_tol"] = v.gain_tol;
  if (v.exhaustive_limit != d.exhaustive_limit)
    s["exhaustive_limit"] = v.exhaustive_limit;
  if (v.sweep_points != d.sweep_points) s["sweep_points"] = v.sweep_points;
  if (v.sweep_t_floor != d.sweep_t_floor) s["sweep_t_floor"] = v.sweep_t_floor;
  if (v.refine_step != d.refine_step) s["refine_step"] = v.refine_step;
  if (v.refine_window != d.refine_window) s["refine_window"] = v.refine_window;
  if (v.policy_grid_points != d.policy_grid_points)
    s["policy_grid_points"] = v.policy_grid_points;
  if (v.policy_grid_lo != d.policy_grid_lo) s["policy_grid_lo"] = v.policy_grid_lo;
  if (v.policy_grid_hi != d.policy_grid_hi) s["policy_grid_hi"] = v.policy_grid_hi;
  if (v.mandate_beta_cap != d.mandate_beta_cap)
    s["mandate_beta_cap"] = v.mandate_beta_cap;
  if (v.seed != d.seed) s["seed"] = v.seed;
  if (v.trials != d.trials) s["trials"] = v.trials;
  if (!s.empty()) root["settings"] = s;
  return root.dump(2) + "\n";
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::verified:
      return 0;
    case SolveStatus::candidate_only:
      return 2;
    case SolveStatus::no_equilibrium_found:
      return 3;
  }
  return 4;
}

std::string report_to_json(const Scenario& scenario,
                           const EquilibriumResult& result,
                           const std::optional<Thresholds>& thresholds) {
  const int k = scenario.market.K;
  json r;
  r["status"] = to_string(result.status);
  r["exit_code"] = exit_code(result.status);
  r["entrants"] = mask_to_array(result.entry, k);
  r["sharing"] = mask_to_array(result.sharing, k);
  r["buyer"] = mask_to_array(result.buyer, k);
  json sigma = json::array();
  json sigma_sq = json::array();
  for (int i = 0; i < k; ++i) {
    sigma.push_back(inf_aware(result.noise.sigma[static_cast<std::size_t>(i)]));
    sigma_sq.push_back(inf_aware(result.noise.sigma_sq(i)));
  }
  r["sigma"] = sigma;
  r["sigma_sq"] = sigma_sq;
  r["prices"] = result.prices.p;
  r["utilities"] = {{"user", result.outcome.u_user},
                    {"platforms", result.outcome.u_platforms},
                    {"buyer", result.outcome.u_buyer}};
  r["welfare"] = welfare(result.outcome, scenario.market);
  r["info_to_buyer"] = result.outcome.info_to_buyer;

  if (thresholds) {
    json t;
    t["alpha_bar"] = thresholds->alpha_bar;
    t["alpha_bar_sharp"] = thresholds->alpha_bar_sharp;
    t["beta_bar"] = thresholds->beta_bar;
    t["beta_bar_refined"] = thresholds->beta_bar_refined;
    t["beta_under"] = inf_aware(thresholds->beta_under);
    t["cost_order"] = thresholds->entry.cost_order;
    t["low_cost_count"] = thresholds->entry.low_cost_count;
    t["beta_entry"] = thresholds->entry.beta;
    t["beta_entry_lower"] = thresholds->entry.beta_lower_bound;
    r["thresholds"] = t;
  }

  json cert;
  cert["user_br_ok"] = result.certificate.user_br_ok;
  cert["boundary_ok"] = result.certificate.boundary_ok;
  json devs = json::array();
  for (const auto& d : result.certificate.noise_deviations)
    devs.push_back({{"platform", d.platform},
                    {"target_count", d.target_count},
                    {"gain", d.gain},
                    {"t_prime", d.t_prime}});
  cert["noise_deviations"] = devs;
  json entries = json::array();
  for (const auto& e : result.certificate.entry_deviations)
    entries.push_back({{"platform", e.platform},
                       {"entering", e.entering},
                       {"gain", e.gain},
                       {"sigma", inf_aware(e.sigma)}});
  cert["entry_deviations"] = entries;
  const double worst = result.certificate.worst_gain();
  cert["worst_gain"] = std::isfinite(worst) ? json(worst) : json("-inf");
  r["certificate"] = cert;
  return r.dump(2) + "\n";
}

ParsedReport parse_report(std::string_view json_text) {
  json r;
  try {
    r = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("report is not valid JSON: ") + e.what());
  }
  ParsedReport out;
  out.status = r.at("status").get<std::string>();
  out.entry = mask_from_array(r.at("entrants"), "entrants");
  out.sharing = mask_from_array(r.at("sharing"), "sharing");
  out.buyer = mask_from_array(r.at("buyer"), "buyer");
  for (const auto& v : r.at("sigma"))
    out.noise.sigma.push_back(number_or_inf(v, "sigma"));
  out.prices.p = r.at("prices").get<std::vector<double>>();
  out.u_user = r.at("utilities").at("user").get<double>();
  out.u_platforms =
      r.at("utilities").at("platforms").get<std::vector<double>>();
  out.u_buyer = r.at("utilities").at("buyer").get<double>();
  out.welfare_value = r.at("welfare").get<double>();
  out.info_to_buyer = r.at("info_to_buyer").get<double>();
  return out;
}

void RegionGridSpec::validate() const {
  if (sigma1_n < 2 || sigma2_n < 2)
    throw InvalidParams("grid resolution must be >= 2 per axis");
  if (sigma1_lo < 0.0 || sigma2_lo < 0.0 || sigma1_hi < sigma1_lo ||
      sigma2_hi < sigma2_lo)
    throw InvalidParams("grid ranges must be nonnegative with lo <= hi");
}

std::string region_grid_csv(const Scenario& scenario,
                            const RegionGridSpec& spec) {
  if (scenario.market.K != 2)
    throw InvalidParams("region-grid requires K = 2");
  spec.validate();
  const MarketParams& m = scenario.market;

  std::string out = "sigma1_sq,sigma2_sq,a1,a2\n";
  for (int i1 = 0; i1 < spec.sigma1_n; ++i1) {
    const double s1 =
        spec.sigma1_lo + (spec.sigma1_hi - spec.sigma1_lo) *
                             (static_cast<double>(i1) / (spec.sigma1_n - 1));
    for (int i2 = 0; i2 < spec.sigma2_n; ++i2) {
      const double s2 =
          spec.sigma2_lo + (spec.sigma2_hi - spec.sigma2_lo) *
                               (static_cast<double>(i2) / (spec.sigma2_n - 1));
      NoiseProfile noise{{std::sqrt(s1), std::sqrt(s2)}};
      const PlatformSet label =
          region_of(m, noise, spec.entry, scenario.settings);
      out += fmt17(s1);
      out += ',';
      out += fmt17(s2);
      out += ',';
      out += contains(label, 0) ? '1' : '0';
      out += ',';
      out += contains(label, 1) ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

std::string beta_sweep_csv(const Scenario& scenario, double beta_lo,
                           double beta_hi, int steps) {
  if (steps < 2) throw InvalidParams("beta sweep needs at least 2 steps");
  if (!(beta_lo >= 0.0 && beta_hi >= beta_lo))
    throw InvalidParams("beta range must be nonnegative with lo <= hi");
  MarketParams m = scenario.market;

  std::string out;
  try {
    const Thresholds th = beta_thresholds(m, scenario.settings);
    out += "# beta_bar=" + fmt17(th.beta_bar) +
           " beta_under=" + fmt17(th.beta_under) + "\n";
    for (int pos = th.entry.low_cost_count; pos < m.K; ++pos) {
      out += "# beta_entry_" + std::to_string(pos + 1) + "=" +
             fmt17(th.entry.beta[static_cast<std::size_t>(pos)]) +
             " (platform " +
             std::to_string(th.entry.cost_order[static_cast<std::size_t>(pos)]) +
             ")\n";
    }
  } catch (const Error& e) {
    out += std::string("# thresholds unavailable: ") + e.what() + "\n";
  }
  out += "beta,status,entrant_count,entrants,u_user,u_buyer,welfare\n";
  for (int k = 0; k < steps; ++k) {
    m.beta = beta_lo + (beta_hi - beta_lo) *
                           (static_cast<double>(k) / (steps - 1));
    EquilibriumResult res;
    if (scenario.policy)
      res = solve_with_policy(m, *scenario.policy, scenario.settings);
    else
      res = solve(m, scenario.settings);
    out += fmt17(m.beta);
    out += ',';
    out += to_string(res.status);
    out += ',';
    out += std::to_string(set_size(res.entry));
    out += ',';
    std::string members;
    for (const int i : set_members(res.entry, m.K)) {
      if (!members.empty()) members += '|';
      members += std::to_string(i);
    }
    out += members.empty() ? "-" : members;
    out += ',';
    out += fmt17(res.outcome.u_user);
    out += ',';
    out += fmt17(res.outcome.u_buyer);
    out += ',';
    out += fmt17(welfare(res.outcome, m));
    out += '\n';
  }
  return out;
}

RegulationPolicy parse_policy(std::string_view json_text, int k) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidParams(std::string("policy is not valid JSON: ") + e.what());
  }
  return parse_policy_json(root, k);
}

RegulationPolicy load_policy_file(const std::string& path, int k) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open policy file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_policy(buf.str(), k);
}

}  // namespace datamarket
