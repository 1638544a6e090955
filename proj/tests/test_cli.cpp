// End-to-end checks of the command-line tool: exit codes, determinism and
// report round trips, driven through the real binary.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "datamarket/scenario.hpp"

namespace fs = std::filesystem;
using namespace datamarket;

namespace {

int checks_failed = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::fprintf(stderr, "FAILED: %s\n", what.c_str());
    ++checks_failed;
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(DATAMARKET_CLI_PATH) + " " + args +
                          " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  const fs::path dir =
      fs::temp_directory_path() / "datamarket_cli_test";
  fs::create_directories(dir);
  const fs::path log = dir / "log.txt";

  const fs::path k2 = dir / "k2.json";
  write_file(k2, R"({"market": {"K": 2, "alpha": 2.0, "beta": 3.0,
      "gamma": [1.0, 1.0], "cost": [0.6, 1.0]}})");

  const fs::path gap = dir / "gap.json";
  write_file(gap, R"({"market": {"K": 3, "alpha": 4.0, "beta": 2.2,
      "gamma": [1.0, 1.0, 1.0], "cost": [0.3, 0.75, 1.0]}})");

  const fs::path bad = dir / "bad.json";
  write_file(bad, R"({"market": {"K": 2, "alpha": 2.0, "beta": 3.0,
      "gamma": [1.2, 1.0], "cost": [0.6, 1.0]}})");

  const fs::path k1 = dir / "k1.json";
  write_file(k1, R"({"market": {"K": 1, "alpha": 0.8, "beta": 0.0,
      "gamma": [1.0], "cost": [0.4]}})");

  const fs::path ban = dir / "ban.json";
  write_file(ban, R"({"kind": "ban_all"})");

  // solve: verified scenario exits 0 and reports the reference numbers.
  const fs::path report1 = dir / "report1.json";
  expect(run("solve " + k2.string() + " --out " + report1.string(), log) == 0,
         "solve exit code");
  const ParsedReport rep = parse_report(slurp(report1));
  expect(rep.status == "verified", "solve report status");
  expect(std::fabs(rep.noise.sigma[0] - 1.0) < 1e-9, "solve report sigma");
  expect(std::fabs(rep.u_user) < 1e-9, "solve report user utility");

  // Determinism: identical invocations produce byte-identical output.
  const fs::path report2 = dir / "report2.json";
  run("solve " + k2.string() + " --out " + report2.string(), log);
  expect(slurp(report1) == slurp(report2), "solve determinism");

  // K=1 closed form through the CLI.
  expect(run("solve " + k1.string(), log) == 0, "k1 solve exit code");

  // Nonexistence regime exits 3.
  expect(run("solve " + gap.string(), log) == 3, "gap exit code");

  // Undecided candidates exit 2.
  const fs::path weak = dir / "weak.json";
  write_file(weak, R"({"market": {"K": 2, "alpha": 3.0, "beta": 5.0,
      "gamma": [1.0, 0.45], "cost": [0.1, 0.1]}})");
  expect(run("solve " + weak.string(), log) == 2, "candidate-only exit code");

  // Validation problems exit 4 and name the field.
  expect(run("solve " + bad.string(), log) == 4, "validation exit code");
  expect(slurp(log).find("gamma") != std::string::npos,
         "validation names the field");

  // region-grid: K=2 works, K=1 is rejected.
  const fs::path grid = dir / "grid.csv";
  expect(run("region-grid " + k2.string() +
                 " --sigma1 0:9:4 --sigma2 0:9:4 --out " + grid.string(),
             log) == 0,
         "region-grid exit code");
  const std::string grid_text = slurp(grid);
  expect(grid_text.rfind("sigma1_sq,sigma2_sq,a1,a2\n", 0) == 0,
         "region-grid header");
  expect(run("region-grid " + k1.string() + " --sigma1 0:9:4 --sigma2 0:9:4",
             log) == 4,
         "region-grid K=1 rejected");
  expect(run("region-grid " + k2.string() + " --sigma1 banana --sigma2 0:9:4",
             log) == 4,
         "region-grid range validation");

  // beta-sweep emits annotated CSV.
  const fs::path sweep = dir / "sweep.csv";
  expect(run("beta-sweep " + gap.string() + " --beta 0:8:17 --out " +
                 sweep.string(),
             log) == 0,
         "beta-sweep exit code");
  const std::string sweep_text = slurp(sweep);
  expect(sweep_text.find("# beta_entry_2=") != std::string::npos,
         "beta-sweep annotations");
  expect(sweep_text.find("beta,status,entrant_count,entrants,u_user,u_buyer,"
                         "welfare\n") != std::string::npos,
         "beta-sweep header");

  // regulate with a ban policy file.
  const fs::path regulated = dir / "regulated.json";
  expect(run("regulate " + k2.string() + " --policy " + ban.string() +
                 " --out " + regulated.string(),
             log) == 0,
         "regulate exit code");
  const ParsedReport banned = parse_report(slurp(regulated));
  expect(banned.info_to_buyer == 0.0, "ban leaks nothing");

  // properties subcommand.
  expect(run("properties --seed 7 --trials 100", log) == 0,
         "properties exit code");
  expect(slurp(log).find("all suites passed") != std::string::npos,
         "properties summary line");

  if (checks_failed == 0) std::printf("cli tests passed\n");
  return checks_failed == 0 ? 0 : 1;
}
