#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("DYNE_CLI");
  REQUIRE(env != nullptr);
  REQUIRE(fs::exists(env));
  return env;
}

fs::path fresh_dir(const char* leaf) {
  const fs::path dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Runs the CLI with `args`, capturing stdout/stderr under `dir`.
// `env_prefix` may set variables sh-style ("DYNE_WORKERS=3 ").
int run_cli(const fs::path& dir, const std::string& args,
            const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + "\"" + cli_path() + "\" " + args +
                          " > \"" + (dir / "stdout.txt").string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  if (!WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string out_of(const fs::path& dir) { return slurp(dir / "stdout.txt"); }
std::string err_of(const fs::path& dir) { return slurp(dir / "stderr.txt"); }

int count_data_rows(const std::string& text) {
  int rows = 0;
  std::size_t start = 0;
  bool seen_header = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    if (!line.empty() && line[0] != '#') {
      if (seen_header) ++rows;
      seen_header = true;
    }
    start = end + 1;
  }
  return rows;
}

}  // namespace

TEST_CASE("--version prints the library version") {
  const fs::path dir = fresh_dir("dyne-cli-version");
  CHECK(run_cli(dir, "--version") == 0);
  CHECK(out_of(dir).find("0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  const fs::path dir = fresh_dir("dyne-cli-usage");
  CHECK(run_cli(dir, "") == 1);                       // subcommand required
  CHECK(run_cli(dir, "simulate --bogus-flag") == 1);  // unknown flag
  CHECK(run_cli(dir, "limits") == 1);                 // --nbar required
  CHECK(run_cli(dir, "sweep --dv 0.02") == 1);        // --grid required
  CHECK(run_cli(dir, "reproduce") == 1);              // name or --list
  CHECK(run_cli(dir, "emit-plots --kind sideways --in x.csv") == 1);
  CHECK(run_cli(dir, "emit-plots --kind ratio --in x.csv --fit-exponent 1.5") ==
        1);  // fit exponent needs prefactor
}

TEST_CASE("limits prints the analytic table and JSON") {
  const fs::path dir = fresh_dir("dyne-cli-limits");
  REQUIRE(run_cli(dir, "limits --nbar 1577 --json") == 0);
  nlohmann::json j = nlohmann::json::parse(out_of(dir));
  CHECK(j.at("nbar") == 1577.0);
  CHECK(j.at("optimal_n0").get<double>() ==
        doctest::Approx(8.29010468148059263).epsilon(1e-14));
  CHECK(j.at("theoretical_limit").get<double>() ==
        doctest::Approx(9.84475188773286087e-7).epsilon(1e-14));
  CHECK_FALSE(j.contains("crossover_nbar"));

  REQUIRE(run_cli(dir, "limits --nbar 1577 --eta 0.98 --json") == 0);
  j = nlohmann::json::parse(out_of(dir));
  CHECK(j.at("efficiency_floor").get<double>() ==
        doctest::Approx((1.0 - 0.98) / (4.0 * 0.98 * 1577.0)).epsilon(1e-12));
  CHECK(j.at("crossover_nbar").get<double>() ==
        doctest::Approx(600.25).epsilon(1e-9));

  REQUIRE(run_cli(dir, "limits --nbar 100") == 0);
  const std::string table = out_of(dir);
  CHECK(table.find("optimal_n0") != std::string::npos);
  CHECK(table.find("mark2_introduced") != std::string::npos);

  CHECK(run_cli(dir, "limits --nbar -5") == 2);
  CHECK(err_of(dir).find("nbar") != std::string::npos);
}

TEST_CASE("simulate writes summaries and is deterministic") {
  const fs::path dir = fresh_dir("dyne-cli-sim");
  const std::string base_args =
      "simulate --nbar 4 --state coherent --policy mark2 --dv 0.01 -n 32 "
      "--seed 7 --phase uniform --per-trajectory --no-timestamp --trace";

  REQUIRE(run_cli(dir, base_args + " --out \"" + (dir / "a").string() + "\"") ==
          0);
  CHECK(fs::exists(dir / "a" / "summary.csv"));
  CHECK(fs::exists(dir / "a" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "trajectories.csv"));
  CHECK(fs::exists(dir / "a" / "trace.dat"));
  CHECK(out_of(dir).find("holevo_var=") != std::string::npos);
  CHECK(count_data_rows(slurp(dir / "a" / "summary.csv")) == 1);
  CHECK(count_data_rows(slurp(dir / "a" / "trajectories.csv")) == 32);

  REQUIRE(run_cli(dir, base_args + " --out \"" + (dir / "b").string() + "\"") ==
          0);
  CHECK(slurp(dir / "b" / "summary.csv") == slurp(dir / "a" / "summary.csv"));
  CHECK(slurp(dir / "b" / "summary.json") == slurp(dir / "a" / "summary.json"));
  CHECK(slurp(dir / "b" / "trajectories.csv") ==
        slurp(dir / "a" / "trajectories.csv"));
}

TEST_CASE("worker count never changes the results") {
  const fs::path dir = fresh_dir("dyne-cli-workers");
  const std::string base_args =
      "simulate --nbar 100 --policy teps --dv 0.005 -n 48 --seed 5 "
      "--phase uniform --per-trajectory";

  REQUIRE(run_cli(dir, base_args + " --workers 1 --out \"" +
                           (dir / "w1").string() + "\"") == 0);
  REQUIRE(run_cli(dir, base_args + " --workers 4 --out \"" +
                           (dir / "w4").string() + "\"") == 0);
  REQUIRE(run_cli(dir,
                  base_args + " --out \"" + (dir / "wenv").string() + "\"",
                  "DYNE_WORKERS=3 ") == 0);

  const std::string w1 = slurp(dir / "w1" / "summary.csv");
  CHECK(slurp(dir / "w4" / "summary.csv") == w1);
  CHECK(slurp(dir / "wenv" / "summary.csv") == w1);
  CHECK(slurp(dir / "w4" / "trajectories.csv") ==
        slurp(dir / "w1" / "trajectories.csv"));

  CHECK(run_cli(dir, base_args, "DYNE_WORKERS=abc ") == 2);
  CHECK(err_of(dir).find("DYNE_WORKERS") != std::string::npos);
}

TEST_CASE("validation and I/O failures use exit codes 2 and 4") {
  const fs::path dir = fresh_dir("dyne-cli-errors");
  CHECK(run_cli(dir, "simulate --nbar -5 -n 4") == 2);
  CHECK(run_cli(dir, "simulate --nbar 4 --policy bogus -n 4") == 2);
  CHECK(run_cli(dir, "simulate --nbar 4 --dv nonsense -n 4") == 2);

  // --out below an existing file cannot be created.
  const fs::path blocker = dir / "blocker";
  std::ofstream(blocker) << "x";
  CHECK(run_cli(dir, "simulate --nbar 4 --state coherent --dv 0.05 -n 4 "
                     "--out \"" +
                         (blocker / "sub").string() + "\"") == 4);

  CHECK(run_cli(dir, "fit --in \"" + (dir / "absent.csv").string() + "\"") ==
        4);
  CHECK(run_cli(dir, "emit-plots --kind ratio --in \"" +
                         (dir / "absent.csv").string() + "\" --out \"" +
                         dir.string() + "\"") == 4);

  // A config file that must be read but does not exist.
  CHECK(run_cli(dir, "simulate --config \"" + (dir / "absent.json").string() +
                         "\"") == 4);
}

TEST_CASE("a config file drives simulate, and flags override it") {
  const fs::path dir = fresh_dir("dyne-cli-config");
  const std::string cfg = R"({
  "schema_version": 1,
  "nbar": 64.0,
  "state": {"kind": "coherent"},
  "policy": {"name": "mark2"},
  "dv_feedback": 0.01,
  "substeps": 1,
  "trajectories": 16,
  "seed": 9,
  "true_phase": "zero",
  "out_dir": ""
})";
  std::ofstream(dir / "cfg.json") << cfg;

  REQUIRE(run_cli(dir, "simulate --config \"" + (dir / "cfg.json").string() +
                           "\" --out \"" + (dir / "from-cfg").string() +
                           "\"") == 0);
  const std::string summary = slurp(dir / "from-cfg" / "summary.csv");
  CHECK(summary.find("# seed=9\n") != std::string::npos);
  CHECK(summary.find(",mark2,") != std::string::npos);

  REQUIRE(run_cli(dir, "simulate --config \"" + (dir / "cfg.json").string() +
                           "\" --seed 10 --out \"" +
                           (dir / "override").string() + "\"") == 0);
  CHECK(slurp(dir / "override" / "summary.csv").find("# seed=10\n") !=
        std::string::npos);

  std::ofstream(dir / "bad.json") << "{\"schema_version\": 2}";
  CHECK(run_cli(dir, "simulate --config \"" + (dir / "bad.json").string() +
                         "\"") == 2);
}

TEST_CASE("the paper dv rule resolves from the command line") {
  const fs::path dir = fresh_dir("dyne-cli-paper");
  REQUIRE(run_cli(dir, "simulate --nbar 100 --state coherent --dv paper "
                       "-n 8 --seed 1 --out \"" +
                           (dir / "out").string() + "\"") == 0);
  // nbar * V_th(nbar) / 25 at nbar = 100 is 7.03517e-4.
  CHECK(out_of(dir).find("dv=0.000703517") != std::string::npos);
}

TEST_CASE("a single trajectory is divergence-safe") {
  const fs::path dir = fresh_dir("dyne-cli-single");
  REQUIRE(run_cli(dir, "simulate --nbar 4 --state coherent --dv 0.02 -n 1 "
                       "--seed 1 --out \"" +
                           (dir / "out").string() + "\"") == 0);
  CHECK(out_of(dir).find("N=1 ") != std::string::npos);
  CHECK(out_of(dir).find("stderr=0 ") != std::string::npos);
}

TEST_CASE("sweep writes per-point rows, a fit, and plot data") {
  const fs::path dir = fresh_dir("dyne-cli-sweep");
  REQUIRE(run_cli(dir, "sweep --grid 50,100,200 --state coherent --dv 0.02 "
                       "-n 64 --seed 3 --phase uniform --fit total --out \"" +
                           (dir / "out").string() + "\"") == 0);
  const std::string stdout_text = out_of(dir);
  CHECK(stdout_text.find("nbar=50 ") != std::string::npos);
  CHECK(stdout_text.find("nbar=200 ") != std::string::npos);
  CHECK(stdout_text.find("fit(total):") != std::string::npos);

  CHECK(count_data_rows(slurp(dir / "out" / "sweep.csv")) == 3);
  CHECK(fs::exists(dir / "out" / "variance_vs_nbar.dat"));
  CHECK(fs::exists(dir / "out" / "ratio_vs_nbar.dat"));

  const nlohmann::json fit = nlohmann::json::parse(slurp(dir / "out" / "fit.json"));
  CHECK(fit.at("mode") == "total");
  // Coherent mark II total variance scales close to 1/nbar.
  CHECK(fit.at("exponent").get<double>() > 0.5);
  CHECK(fit.at("exponent").get<double>() < 1.6);

  SUBCASE("the fit subcommand reproduces the sweep's own fit") {
    REQUIRE(run_cli(dir, "fit --in \"" + (dir / "out" / "sweep.csv").string() +
                             "\" --state coherent --json") == 0);
    const nlohmann::json refit = nlohmann::json::parse(out_of(dir));
    CHECK(refit.at("exponent") == fit.at("exponent"));
    CHECK(refit.at("prefactor") == fit.at("prefactor"));
  }
}

TEST_CASE("analyze-zeta writes the scatter family") {
  const fs::path dir = fresh_dir("dyne-cli-zeta");
  REQUIRE(run_cli(dir, "analyze-zeta --nbar 100 --policy teps --dv 0.005 "
                       "-n 32 --seed 11 --phase uniform --out \"" +
                           (dir / "out").string() + "\"") == 0);
  CHECK(out_of(dir).find("zeta scatter:") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "trajectories.csv"));
  CHECK(fs::exists(dir / "out" / "zeta_excess.csv"));
  CHECK(fs::exists(dir / "out" / "zeta_scatter.dat"));
  CHECK(fs::exists(dir / "out" / "zeta_optimum.dat"));
  CHECK(fs::exists(dir / "out" / "contributions.dat"));

  SUBCASE("emit-plots re-emits every family from the persisted files") {
    REQUIRE(run_cli(dir, "emit-plots --kind zeta-scatter --in \"" +
                             (dir / "out" / "trajectories.csv").string() +
                             "\" --out \"" + (dir / "replot").string() +
                             "\"") == 0);
    CHECK(fs::exists(dir / "replot" / "zeta_scatter.dat"));

    REQUIRE(run_cli(dir, "emit-plots --kind contributions --in \"" +
                             (dir / "out" / "zeta_excess.csv").string() +
                             "\" --out \"" + (dir / "replot").string() +
                             "\"") == 0);
    CHECK(fs::exists(dir / "replot" / "contributions.dat"));
  }
}

TEST_CASE("reproduce lists presets and runs the analytic one") {
  const fs::path dir = fresh_dir("dyne-cli-repro");
  REQUIRE(run_cli(dir, "reproduce --list") == 0);
  const std::string listing = out_of(dir);
  for (const char* name : {"n1577", "n1577-fine100", "n1577-fine1000",
                           "crossover-eta98", "corrected-1e4", "corrected-5e6",
                           "corrected-2e7"}) {
    CHECK(listing.find(name) != std::string::npos);
  }

  REQUIRE(run_cli(dir, "reproduce crossover-eta98") == 0);
  CHECK(out_of(dir).find("-> pass") != std::string::npos);

  CHECK(run_cli(dir, "reproduce not-a-preset") == 2);
  CHECK(err_of(dir).find("available:") != std::string::npos);
}
