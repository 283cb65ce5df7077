// Command-line front end. Talks to the toolkit exclusively through the
// public C interface in dyne/dyne.h.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyne/dyne.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitIo = 4;

int exit_code_for(int rc) {
  return rc == DYNE_ERR_IO ? kExitIo : kExitValidation;
}

[[noreturn]] void die(int code, const std::string& msg) {
  std::fprintf(stderr, "dyne: %s\n", msg.c_str());
  std::exit(code);
}

// Aborts with the thread's last library error when a call failed.
void check(int rc) {
  if (rc != DYNE_OK) die(exit_code_for(rc), dyne_last_error());
}

std::string fmt(double x, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

unsigned env_workers() {
  const char* env = std::getenv("DYNE_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0 || v > 4096) {
    die(kExitValidation,
        std::string("DYNE_WORKERS must be a positive integer, got '") + env +
            "'");
  }
  return static_cast<unsigned>(v);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kExitIo, "cannot open '" + path + "': " + std::strerror(errno));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    die(kExitIo, "cannot create directory '" + dir + "': " + ec.message());
  }
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

struct ConfigHandle {
  dyne_config* p = dyne_config_new();
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
  ~ConfigHandle() { dyne_config_free(p); }
};

struct ResultHandle {
  dyne_result* p = nullptr;
  ResultHandle() = default;
  ResultHandle(const ResultHandle&) = delete;
  ResultHandle& operator=(const ResultHandle&) = delete;
  ~ResultHandle() { dyne_result_free(p); }
};

struct ResultList {
  std::vector<dyne_result*> items;
  ResultList() = default;
  ResultList(const ResultList&) = delete;
  ResultList& operator=(const ResultList&) = delete;
  ~ResultList() {
    for (dyne_result* r : items) dyne_result_free(r);
  }
  const dyne_result* const* data() const {
    return const_cast<const dyne_result* const*>(items.data());
  }
};

// Options shared by the simulating subcommands; flags override --config.
struct SimOpts {
  std::string config_path;
  double nbar = 100.0;
  std::string state = "optimal_squeezed";
  std::string policy = "mark2";
  std::string dv = "0.001";
  int substeps = 1;
  std::uint64_t trajectories = 1000;
  std::uint64_t seed = 1;
  std::string phase = "zero";
  std::string out_dir = ".";
  unsigned workers = 0;
  bool trace = false;
};

void add_sim_options(CLI::App* cmd, SimOpts& o, bool with_nbar) {
  cmd->add_option("--config", o.config_path,
                  "JSON configuration file; other flags override it");
  if (with_nbar) cmd->add_option("--nbar", o.nbar, "mean photon number");
  cmd->add_option("--state", o.state, "input state")
      ->check(CLI::IsMember({"coherent", "optimal_squeezed"}));
  cmd->add_option("--policy", o.policy,
                  "feedback policy NAME[:params]; one of heterodyne[:detuning],"
                  " mark1, mark2, ceps[:epsilon], teps[:divisor],"
                  " corrected[:lambda=,divisor=,onset_v=]");
  cmd->add_option("--dv", o.dv, "feedback interval: a number or 'paper'");
  cmd->add_option("--substeps", o.substeps,
                  "integration substeps per feedback interval")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--trajectories,-n", o.trajectories, "ensemble size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--phase", o.phase, "true phase: zero or uniform")
      ->check(CLI::IsMember({"zero", "uniform"}));
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--workers", o.workers,
                  "worker threads (default: DYNE_WORKERS or 1)");
  cmd->add_flag("--trace", o.trace,
                "write trajectory 0's feedback history to trace.dat");
}

unsigned resolve_workers(const CLI::App* cmd, const SimOpts& o) {
  return cmd->count("--workers") > 0 ? o.workers : env_workers();
}

// Builds a config handle from --config (if given) plus explicit flags.
void apply_sim_options(const CLI::App* cmd, const SimOpts& o,
                       dyne_config* cfg) {
  if (cmd->count("--config") > 0) {
    const std::string text = read_file(o.config_path);
    check(dyne_config_load_json(cfg, text.c_str()));
  }
  if (cmd->get_option_no_throw("--nbar") != nullptr &&
      cmd->count("--nbar") > 0) {
    check(dyne_config_set_nbar(cfg, o.nbar));
  }
  if (cmd->count("--state") > 0) {
    check(dyne_config_set_state_kind(cfg, o.state.c_str()));
  }
  if (cmd->count("--policy") > 0) {
    check(dyne_config_set_policy(cfg, o.policy.c_str()));
  }
  if (cmd->count("--dv") > 0) {
    if (o.dv == "paper") {
      check(dyne_config_set_paper_rule(cfg, 1));
    } else {
      char* end = nullptr;
      const double v = std::strtod(o.dv.c_str(), &end);
      if (end == o.dv.c_str() || *end != '\0') {
        die(kExitValidation,
            "--dv expects a number or 'paper', got '" + o.dv + "'");
      }
      check(dyne_config_set_dv(cfg, v));
    }
  }
  if (cmd->count("--substeps") > 0) {
    check(dyne_config_set_substeps(cfg, o.substeps));
  }
  if (cmd->count("--trajectories") > 0) {
    check(dyne_config_set_trajectories(cfg, o.trajectories));
  }
  if (cmd->count("--seed") > 0) check(dyne_config_set_seed(cfg, o.seed));
  if (cmd->count("--phase") > 0) {
    check(dyne_config_set_random_phase(cfg, o.phase == "uniform" ? 1 : 0));
  }
}

void print_run_line(const dyne_config* cfg, const dyne_result* res) {
  double dv = 0.0, holevo = 0.0, se = 0.0, wrapped = 0.0, ratio = 0.0;
  std::uint64_t total = 0, failed = 0;
  check(dyne_config_resolved_dv(cfg, &dv));
  check(dyne_result_holevo(res, &holevo));
  check(dyne_result_holevo_stderr(res, &se));
  check(dyne_result_wrapped(res, &wrapped));
  check(dyne_result_ratio_to_limit(res, &ratio));
  check(dyne_result_n_trajectories(res, &total));
  check(dyne_result_failed_count(res, &failed));
  std::printf(
      "dv=%s N=%llu failed=%llu holevo_var=%s stderr=%s wrapped_var=%s "
      "ratio_to_limit=%s\n",
      fmt(dv).c_str(), static_cast<unsigned long long>(total),
      static_cast<unsigned long long>(failed), fmt(holevo).c_str(),
      fmt(se).c_str(), fmt(wrapped).c_str(), fmt(ratio).c_str());
}

// Fails the run when more than 1% of trajectories blew up.
void enforce_failure_threshold(const dyne_result* res) {
  std::uint64_t total = 0, failed = 0;
  check(dyne_result_n_trajectories(res, &total));
  check(dyne_result_failed_count(res, &failed));
  if (total > 0 && static_cast<double>(failed) > 0.01 * static_cast<double>(total)) {
    die(kExitValidation,
        std::to_string(failed) + " of " + std::to_string(total) +
            " trajectories failed (above the 1% threshold)");
  }
}

/* ---------- limits ---------- */

void run_limits(double nbar, bool with_eta, double eta, bool as_json) {
  double n0 = 0.0, intrinsic = 0.0, limit = 0.0, mark2 = 0.0, het = 0.0;
  check(dyne_optimal_n0(nbar, &n0));
  check(dyne_intrinsic_phase_variance(nbar, n0, &intrinsic));
  check(dyne_theoretical_limit(nbar, &limit));
  check(dyne_mark2_introduced(nbar, &mark2));
  check(dyne_heterodyne_introduced(nbar, &het));
  double floor = 0.0, crossover = 0.0;
  if (with_eta) {
    check(dyne_efficiency_floor(eta, nbar, &floor));
    check(dyne_crossover_nbar(eta, 1.0, 1e12, &crossover));
  }
  if (as_json) {
    std::string out = "{\n";
    auto field = [&out](const char* name, double value, bool last = false) {
      out += "  \"" + std::string(name) + "\": " + fmt(value, "%.17g") +
             (last ? "\n" : ",\n");
    };
    field("nbar", nbar);
    field("optimal_n0", n0);
    field("intrinsic_variance", intrinsic);
    field("theoretical_limit", limit);
    field("mark2_introduced", mark2);
    field("heterodyne_introduced", het, !with_eta);
    if (with_eta) {
      field("eta", eta);
      field("efficiency_floor", floor);
      field("crossover_nbar", crossover, true);
    }
    out += "}\n";
    std::fputs(out.c_str(), stdout);
    return;
  }
  std::printf("nbar                   %s\n", fmt(nbar).c_str());
  std::printf("optimal_n0             %s\n", fmt(n0).c_str());
  std::printf("intrinsic_variance     %s\n", fmt(intrinsic).c_str());
  std::printf("theoretical_limit      %s\n", fmt(limit).c_str());
  std::printf("mark2_introduced       %s\n", fmt(mark2).c_str());
  std::printf("heterodyne_introduced  %s\n", fmt(het).c_str());
  if (with_eta) {
    std::printf("efficiency_floor       %s\n", fmt(floor).c_str());
    std::printf("crossover_nbar         %s\n", fmt(crossover).c_str());
  }
}

/* ---------- simulate ---------- */

void run_simulate(const CLI::App* cmd, const SimOpts& o, bool per_trajectory,
                  bool no_timestamp) {
  ConfigHandle cfg;
  apply_sim_options(cmd, o, cfg.p);
  ensure_dir(o.out_dir);

  const std::string trace_path = join(o.out_dir, "trace.dat");
  ResultHandle res;
  check(dyne_simulate(cfg.p, resolve_workers(cmd, o),
                      o.trace ? trace_path.c_str() : nullptr, &res.p));

  check(dyne_result_write_summary_csv(res.p,
                                      join(o.out_dir, "summary.csv").c_str()));
  check(dyne_result_write_summary_json(
      res.p, join(o.out_dir, "summary.json").c_str(), no_timestamp ? 0 : 1));
  if (per_trajectory) {
    check(dyne_result_write_trajectory_csv(
        res.p, join(o.out_dir, "trajectories.csv").c_str()));
  }
  print_run_line(cfg.p, res.p);
  std::printf("wrote %s\n", join(o.out_dir, "summary.{csv,json}").c_str());
  enforce_failure_threshold(res.p);
}

/* ---------- sweep ---------- */

// Base name of a NAME[:params] policy string.
std::string policy_base(const std::string& policy) {
  return policy.substr(0, policy.find(':'));
}

dyne_result* simulate_point(const CLI::App* cmd, const SimOpts& o, double nbar,
                            const std::string& policy, std::uint64_t n_traj,
                            unsigned workers) {
  ConfigHandle cfg;
  apply_sim_options(cmd, o, cfg.p);
  check(dyne_config_set_nbar(cfg.p, nbar));
  if (!policy.empty()) check(dyne_config_set_policy(cfg.p, policy.c_str()));
  if (n_traj > 0) check(dyne_config_set_trajectories(cfg.p, n_traj));
  dyne_result* res = nullptr;
  check(dyne_simulate(cfg.p, workers, nullptr, &res));
  return res;
}

double holevo_of(const dyne_result* res) {
  double h = 0.0;
  check(dyne_result_holevo(res, &h));
  return h;
}

// Golden-section minimum of the measured variance over epsilon in
// [0.2, 1.0] (tolerance 1e-2), evaluated with a quarter of the ensemble.
double optimize_epsilon(const CLI::App* cmd, const SimOpts& o, double nbar,
                        unsigned workers) {
  const std::uint64_t n_search =
      std::max<std::uint64_t>(o.trajectories / 4, 1);
  auto eval = [&](double eps) {
    ResultHandle r;
    r.p = simulate_point(cmd, o, nbar, "ceps:" + fmt(eps, "%.12g"), n_search,
                         workers);
    return holevo_of(r.p);
  };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.2, b = 1.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > 1e-2) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = eval(d);
    }
  }
  return 0.5 * (a + b);
}

void run_sweep(const CLI::App* cmd, const SimOpts& o,
               const std::vector<double>& grid, bool optimize_eps,
               const std::string& fit_mode) {
  if (optimize_eps && cmd->count("--policy") > 0 &&
      policy_base(o.policy) != "ceps" &&
      policy_base(o.policy) != "constant-epsilon") {
    die(kExitValidation,
        "--optimize-eps searches the constant-epsilon family; --policy must "
        "be ceps (or omitted)");
  }
  const unsigned workers = resolve_workers(cmd, o);
  ensure_dir(o.out_dir);

  ResultList results;
  for (const double nbar : grid) {
    std::string policy;
    if (optimize_eps) {
      const double eps = optimize_epsilon(cmd, o, nbar, workers);
      policy = "ceps:" + fmt(eps, "%.12g");
    }
    dyne_result* res = simulate_point(cmd, o, nbar, policy, 0, workers);
    results.items.push_back(res);
    double holevo = 0.0, ratio = 0.0;
    check(dyne_result_holevo(res, &holevo));
    check(dyne_result_ratio_to_limit(res, &ratio));
    const std::string chosen = optimize_eps ? " " + policy : "";
    std::printf("nbar=%s%s holevo_var=%s ratio_to_limit=%s\n",
                fmt(nbar).c_str(), chosen.c_str(), fmt(holevo).c_str(),
                fmt(ratio).c_str());
  }

  const std::string csv_path = join(o.out_dir, "sweep.csv");
  check(dyne_results_write_summary_csv(results.data(), results.items.size(),
                                       csv_path.c_str()));

  double fit_params[2] = {0.0, 0.0};
  bool have_total_fit = false;
  if (!fit_mode.empty()) {
    std::vector<double> nbars(results.items.size());
    std::vector<double> values(results.items.size());
    size_t n_rows = 0;
    check(dyne_summary_read(csv_path.c_str(), o.state.c_str(), nbars.data(),
                            values.data(), nullptr, nbars.size(), &n_rows));
    if (fit_mode == "introduced") {
      std::vector<double> intr(results.items.size());
      check(dyne_summary_read(csv_path.c_str(), o.state.c_str(), nullptr,
                              nullptr, intr.data(), intr.size(), &n_rows));
      for (size_t i = 0; i < values.size(); ++i) values[i] -= intr[i];
    }
    double exponent = 0.0, prefactor = 0.0, se = 0.0, r2 = 0.0;
    check(dyne_power_law_fit(nbars.data(), values.data(), nbars.size(),
                             &exponent, &prefactor, &se, &r2));
    std::printf("fit(%s): variance = %s * nbar^-%s  (exponent stderr %s, "
                "r^2 %s)\n",
                fit_mode.c_str(), fmt(prefactor).c_str(),
                fmt(exponent).c_str(), fmt(se).c_str(), fmt(r2).c_str());
    std::string fit_json = "{\n  \"mode\": \"" + fit_mode + "\",\n";
    fit_json += "  \"exponent\": " + fmt(exponent, "%.17g") + ",\n";
    fit_json += "  \"prefactor\": " + fmt(prefactor, "%.17g") + ",\n";
    fit_json += "  \"exponent_stderr\": " + fmt(se, "%.17g") + ",\n";
    fit_json += "  \"r_squared\": " + fmt(r2, "%.17g") + "\n}\n";
    std::ofstream out(join(o.out_dir, "fit.json"), std::ios::trunc);
    if (!out) die(kExitIo, "cannot write " + join(o.out_dir, "fit.json"));
    out << fit_json;
    fit_params[0] = exponent;
    fit_params[1] = prefactor;
    have_total_fit = fit_mode == "total";
  }

  check(dyne_emit_plots(results.data(), results.items.size(),
                        "variance-vs-nbar", o.out_dir.c_str(),
                        have_total_fit ? fit_params : nullptr));
  check(dyne_emit_plots(results.data(), results.items.size(), "ratio",
                        o.out_dir.c_str(), nullptr));
  std::printf("wrote %s and plot data in %s\n", csv_path.c_str(),
              o.out_dir.c_str());
}

/* ---------- fit ---------- */

void run_fit(const std::string& in_path, const std::string& state,
             bool introduced, bool as_json) {
  size_t n_rows = 0;
  check(dyne_summary_read(in_path.c_str(), state.c_str(), nullptr, nullptr,
                          nullptr, 0, &n_rows));
  std::vector<double> nbars(n_rows), values(n_rows), intr(n_rows);
  check(dyne_summary_read(in_path.c_str(), state.c_str(), nbars.data(),
                          values.data(), intr.data(), n_rows, &n_rows));
  if (introduced) {
    for (size_t i = 0; i < n_rows; ++i) values[i] -= intr[i];
  }
  double exponent = 0.0, prefactor = 0.0, se = 0.0, r2 = 0.0;
  check(dyne_power_law_fit(nbars.data(), values.data(), n_rows, &exponent,
                           &prefactor, &se, &r2));
  if (as_json) {
    std::printf(
        "{\n  \"mode\": \"%s\",\n  \"exponent\": %s,\n  \"prefactor\": %s,\n"
        "  \"exponent_stderr\": %s,\n  \"r_squared\": %s\n}\n",
        introduced ? "introduced" : "total", fmt(exponent, "%.17g").c_str(),
        fmt(prefactor, "%.17g").c_str(), fmt(se, "%.17g").c_str(),
        fmt(r2, "%.17g").c_str());
  } else {
    std::printf("fit over %zu points (%s variance):\n", n_rows,
                introduced ? "introduced" : "total");
    std::printf("  variance = %s * nbar^-%s\n", fmt(prefactor).c_str(),
                fmt(exponent).c_str());
    std::printf("  exponent stderr %s, r^2 %s\n", fmt(se).c_str(),
                fmt(r2).c_str());
  }
}

/* ---------- analyze-zeta ---------- */

void run_analyze_zeta(const CLI::App* cmd, const SimOpts& o) {
  ConfigHandle cfg;
  apply_sim_options(cmd, o, cfg.p);
  ensure_dir(o.out_dir);

  ResultHandle res;
  check(dyne_simulate(cfg.p, resolve_workers(cmd, o), nullptr, &res.p));

  double ex_mod = 0.0, ex_phase = 0.0, below = 0.0;
  check(dyne_result_zeta_excess(res.p, &ex_mod, &ex_phase, &below));

  check(dyne_result_write_trajectory_csv(
      res.p, join(o.out_dir, "trajectories.csv").c_str()));
  const dyne_result* rp = res.p;
  check(dyne_results_write_zeta_excess_csv(
      &rp, 1, join(o.out_dir, "zeta_excess.csv").c_str()));
  check(dyne_emit_plots(&rp, 1, "zeta-scatter", o.out_dir.c_str(), nullptr));
  check(dyne_emit_plots(&rp, 1, "contributions", o.out_dir.c_str(), nullptr));

  print_run_line(cfg.p, res.p);
  std::printf(
      "zeta scatter: excess_from_modulus=%s excess_from_phase=%s "
      "fraction_below_optimum=%s\n",
      fmt(ex_mod).c_str(), fmt(ex_phase).c_str(), fmt(below).c_str());
  std::printf("wrote trajectories.csv, zeta_excess.csv and plot data in %s\n",
              o.out_dir.c_str());
  enforce_failure_threshold(res.p);
}

/* ---------- reproduce ---------- */

void list_presets() {
  const int n = dyne_preset_count();
  for (int i = 0; i < n; ++i) {
    char name[128];
    check(dyne_preset_name(i, name, sizeof(name)));
    char desc[512];
    check(dyne_preset_description(name, desc, sizeof(desc)));
    std::printf("%-16s %s\n", name, desc);
  }
}

void run_reproduce(const std::string& name, unsigned workers) {
  char report[16384];
  int passed = 0;
  const int rc = dyne_reproduce(name.c_str(), workers, report, sizeof(report),
                                &passed);
  if (rc != DYNE_OK) die(exit_code_for(rc), dyne_last_error());
  std::fputs(report, stdout);
  if (report[0] != '\0' && report[std::strlen(report) - 1] != '\n') {
    std::fputc('\n', stdout);
  }
  if (passed == 0) std::exit(kExitTolerance);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "adaptive dyne phase measurement: trajectory simulator, analytic "
      "limits, and reproduction presets"};
  app.set_version_flag("--version", dyne_version());
  app.require_subcommand(1);

  // limits
  auto* limits = app.add_subcommand(
      "limits", "print the analytic variances and limits for one nbar");
  double limits_nbar = 100.0;
  double limits_eta = 1.0;
  bool limits_json = false;
  limits->add_option("--nbar", limits_nbar, "mean photon number")->required();
  auto* eta_opt = limits->add_option(
      "--eta", limits_eta, "detector efficiency; adds floor and crossover");
  limits->add_flag("--json", limits_json, "machine-readable output");
  limits->callback([&] {
    run_limits(limits_nbar, eta_opt->count() > 0, limits_eta, limits_json);
  });

  // simulate
  auto* simulate =
      app.add_subcommand("simulate", "run one ensemble and write summaries");
  SimOpts sim_opts;
  bool sim_per_traj = false;
  bool sim_no_timestamp = false;
  add_sim_options(simulate, sim_opts, true);
  simulate->add_flag("--per-trajectory", sim_per_traj,
                     "also write per-trajectory results");
  simulate->add_flag("--no-timestamp", sim_no_timestamp,
                     "omit the timestamp from summary.json");
  simulate->callback(
      [&] { run_simulate(simulate, sim_opts, sim_per_traj, sim_no_timestamp); });

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "run an ensemble per nbar and fit the scaling");
  SimOpts sweep_opts;
  std::vector<double> sweep_grid;
  bool sweep_optimize = false;
  std::string sweep_fit;
  add_sim_options(sweep, sweep_opts, false);
  sweep->add_option("--grid", sweep_grid, "comma-separated nbar values")
      ->required()
      ->delimiter(',');
  sweep->add_flag("--optimize-eps", sweep_optimize,
                  "golden-section epsilon search per point (ceps policy)");
  sweep->add_option("--fit", sweep_fit,
                    "fit a power law to the total or introduced variance")
      ->check(CLI::IsMember({"total", "introduced"}));
  sweep->callback(
      [&] { run_sweep(sweep, sweep_opts, sweep_grid, sweep_optimize, sweep_fit); });

  // fit
  auto* fit = app.add_subcommand(
      "fit", "fit a power law to a summary CSV written by simulate/sweep");
  std::string fit_in, fit_state = "optimal_squeezed";
  bool fit_introduced = false;
  bool fit_json = false;
  fit->add_option("--in", fit_in, "summary CSV path")->required();
  fit->add_option("--state", fit_state, "input state the runs used")
      ->check(CLI::IsMember({"coherent", "optimal_squeezed"}));
  fit->add_flag("--introduced", fit_introduced,
                "subtract the intrinsic variance before fitting");
  fit->add_flag("--json", fit_json, "machine-readable output");
  fit->callback([&] { run_fit(fit_in, fit_state, fit_introduced, fit_json); });

  // analyze-zeta
  auto* zeta = app.add_subcommand(
      "analyze-zeta",
      "run one ensemble and analyze the recovered squeezing scatter");
  SimOpts zeta_opts;
  add_sim_options(zeta, zeta_opts, true);
  zeta->callback([&] { run_analyze_zeta(zeta, zeta_opts); });

  // reproduce
  auto* repro = app.add_subcommand(
      "reproduce", "run a canned experiment and check its pinned value");
  std::string repro_name;
  unsigned repro_workers = 0;
  bool repro_list = false;
  auto* repro_name_opt =
      repro->add_option("name", repro_name, "preset name (see --list)");
  auto* repro_workers_opt = repro->add_option(
      "--workers", repro_workers, "worker threads (default: DYNE_WORKERS or 1)");
  repro->add_flag("--list", repro_list, "list the available presets");
  repro->callback([&] {
    if (repro_list) {
      list_presets();
      return;
    }
    if (repro_name_opt->count() == 0) {
      die(kExitUsage, "reproduce needs a preset name (or --list)");
    }
    run_reproduce(repro_name,
                  repro_workers_opt->count() > 0 ? repro_workers
                                                 : env_workers());
  });

  // emit-plots
  auto* emit = app.add_subcommand(
      "emit-plots", "re-emit plot data from persisted CSV files");
  std::string emit_kind, emit_in, emit_out = ".";
  std::string emit_state = "optimal_squeezed";
  double emit_fit_exponent = 0.0, emit_fit_prefactor = 0.0;
  emit->add_option("--kind", emit_kind, "plot family")
      ->required()
      ->check(CLI::IsMember(
          {"variance-vs-nbar", "ratio", "zeta-scatter", "contributions"}));
  emit->add_option("--in", emit_in,
                   "input CSV: summary (variance-vs-nbar, ratio), trajectory "
                   "(zeta-scatter), or zeta-excess (contributions)")
      ->required();
  emit->add_option("--out", emit_out, "output directory");
  emit->add_option("--state", emit_state, "input state for reference curves")
      ->check(CLI::IsMember({"coherent", "optimal_squeezed"}));
  auto* fit_e = emit->add_option("--fit-exponent", emit_fit_exponent,
                                 "add a fitted power law to the variance plot");
  auto* fit_p = emit->add_option("--fit-prefactor", emit_fit_prefactor,
                                 "prefactor of the fitted power law");
  fit_e->needs(fit_p);
  fit_p->needs(fit_e);
  emit->callback([&] {
    const double fit_params[2] = {emit_fit_exponent, emit_fit_prefactor};
    check(dyne_emit_plots_from_file(
        emit_kind.c_str(), emit_in.c_str(), emit_out.c_str(),
        emit_state.c_str(), fit_e->count() > 0 ? fit_params : nullptr));
    std::printf("wrote %s plot data in %s\n", emit_kind.c_str(),
                emit_out.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return 0;
}
