#include "dyne/dyne.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/report.hpp"
#include "core/reproduce.hpp"
#include "core/stats.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

int fail(int code, const std::string& msg) {
  set_error(msg);
  return code;
}

// Maps a thrown exception to a status code and records its message.
int translate_current_exception() {
  try {
    throw;
  } catch (const dyne::IoError& e) {
    return fail(DYNE_ERR_IO, e.what());
  } catch (const std::domain_error& e) {
    return fail(DYNE_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(DYNE_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(DYNE_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(DYNE_ERR_RUNTIME, "unknown error");
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    set_error("");
    return DYNE_OK;
  } catch (...) {
    return translate_current_exception();
  }
}

int copy_out(const std::string& text, char* buf, size_t cap) {
  if (buf == nullptr || cap == 0) {
    return fail(DYNE_ERR_INVALID, "output buffer is null or empty");
  }
  const size_t n = std::min(cap - 1, text.size());
  std::memcpy(buf, text.data(), n);
  buf[n] = '\0';
  set_error("");
  return DYNE_OK;
}

}  // namespace

struct dyne_config {
  dyne::SimConfig cfg;
};

struct dyne_result {
  dyne::SimConfig cfg;
  std::vector<dyne::TrajectoryOutcome> outcomes;
  dyne::EnsembleStats stats;
  mutable std::optional<dyne::ZetaScatter> scatter;

  const dyne::ZetaScatter& get_scatter() const {
    if (!scatter) scatter = dyne::zeta_scatter(outcomes);
    return *scatter;
  }
};

extern "C" {

const char* dyne_version(void) { return dyne::kVersion; }

const char* dyne_last_error(void) { return g_last_error.c_str(); }

/* ---------- analytic formulas ---------- */

#define DYNE_FORMULA_1(name, expr)                                      \
  int name(double nbar, double* out) {                                  \
    if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");   \
    return guarded([&] { *out = (expr); });                             \
  }

DYNE_FORMULA_1(dyne_optimal_n0, dyne::optimal_n0(nbar))
DYNE_FORMULA_1(dyne_theoretical_limit, dyne::theoretical_limit(nbar))
DYNE_FORMULA_1(dyne_mark2_introduced, dyne::markII_introduced(nbar))
DYNE_FORMULA_1(dyne_heterodyne_introduced, dyne::heterodyne_introduced(nbar))

#undef DYNE_FORMULA_1

int dyne_intrinsic_phase_variance(double nbar, double n0, double* out) {
  if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");
  return guarded([&] { *out = dyne::intrinsic_phase_variance(nbar, n0); });
}

int dyne_efficiency_floor(double eta, double nbar, double* out) {
  if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");
  return guarded([&] { *out = dyne::efficiency_floor(eta, nbar); });
}

int dyne_crossover_nbar(double eta, double lo, double hi, double* out) {
  if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");
  return guarded([&] { *out = dyne::crossover_nbar(eta, lo, hi); });
}

/* ---------- configuration ---------- */

dyne_config* dyne_config_new(void) { return new dyne_config(); }

void dyne_config_free(dyne_config* config) { delete config; }

int dyne_config_load_json(dyne_config* config, const char* text) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (text == nullptr) return fail(DYNE_ERR_INVALID, "text is null");
  return guarded([&] { config->cfg = dyne::config_from_json(text); });
}

int dyne_config_dump_json(const dyne_config* config, char* buf, size_t cap,
                          size_t* needed) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  try {
    const std::string text = dyne::config_to_json(config->cfg);
    if (needed != nullptr) *needed = text.size();
    if (buf != nullptr && cap > 0) {
      const size_t n = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
    set_error("");
    return DYNE_OK;
  } catch (...) {
    return translate_current_exception();
  }
}

int dyne_config_set_nbar(dyne_config* config, double nbar) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (!(nbar > 0.0)) return fail(DYNE_ERR_DOMAIN, "nbar must be > 0");
  config->cfg.nbar = nbar;
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_state_kind(dyne_config* config, const char* kind) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (kind == nullptr) return fail(DYNE_ERR_INVALID, "kind is null");
  const std::string k(kind);
  if (k == "coherent") {
    config->cfg.state_kind = dyne::StateKind::kCoherent;
  } else if (k == "optimal_squeezed") {
    config->cfg.state_kind = dyne::StateKind::kOptimalSqueezed;
  } else {
    return fail(DYNE_ERR_INVALID, "unknown state kind '" + k + "'");
  }
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_policy(dyne_config* config, const char* policy) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (policy == nullptr) return fail(DYNE_ERR_INVALID, "policy is null");
  return guarded([&] { config->cfg.policy = dyne::parse_policy(policy); });
}

int dyne_config_set_dv(dyne_config* config, double dv) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (!(dv > 0.0) || !(dv < 1.0)) {
    return fail(DYNE_ERR_DOMAIN, "dv must be in (0, 1)");
  }
  config->cfg.dv_feedback = dv;
  config->cfg.paper_rule = false;
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_paper_rule(dyne_config* config, int enabled) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  config->cfg.paper_rule = enabled != 0;
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_substeps(dyne_config* config, int substeps) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (substeps < 1) return fail(DYNE_ERR_DOMAIN, "substeps must be >= 1");
  config->cfg.substeps = substeps;
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_trajectories(dyne_config* config, uint64_t n) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (n == 0) return fail(DYNE_ERR_DOMAIN, "trajectories must be >= 1");
  config->cfg.n_trajectories = n;
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_seed(dyne_config* config, uint64_t seed) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  config->cfg.master_seed = seed;
  set_error("");
  return DYNE_OK;
}

int dyne_config_set_random_phase(dyne_config* config, int enabled) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  config->cfg.random_true_phase = enabled != 0;
  set_error("");
  return DYNE_OK;
}

int dyne_config_hash(const dyne_config* config, uint64_t* out) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");
  return guarded([&] { *out = dyne::config_hash(config->cfg); });
}

int dyne_config_resolved_dv(const dyne_config* config, double* out) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");
  return guarded([&] { *out = dyne::resolved_dv(config->cfg); });
}

/* ---------- simulation ---------- */

int dyne_simulate(const dyne_config* config, unsigned workers,
                  const char* trace_path, dyne_result** out) {
  if (config == nullptr) return fail(DYNE_ERR_INVALID, "config is null");
  if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto result = std::make_unique<dyne_result>();
    result->cfg = config->cfg;

    std::string trace_text;
    dyne::TraceSink sink;
    const dyne::TraceSink* sink_ptr = nullptr;
    if (trace_path != nullptr) {
      trace_text = "# trajectory 0 feedback history\n# columns: v Phi abs_A abs_B arg_C\n";
      sink = [&trace_text](double v, double phi, double abs_a, double abs_b,
                           double arg_c) {
        char line[192];
        std::snprintf(line, sizeof(line), "%.17g %.17g %.17g %.17g %.17g\n", v,
                      phi, abs_a, abs_b, arg_c);
        trace_text += line;
      };
      sink_ptr = &sink;
    }

    result->outcomes =
        dyne::run_ensemble(dyne::ensemble_spec(config->cfg), workers, sink_ptr);
    result->stats = dyne::summarize(result->outcomes);

    if (trace_path != nullptr) {
      dyne::write_text_file(trace_path, trace_text);
    }
    *out = result.release();
  });
}

void dyne_result_free(dyne_result* result) { delete result; }

#define DYNE_RESULT_GET(name, type, expr)                               \
  int name(const dyne_result* result, type* out) {                      \
    if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null"); \
    if (out == nullptr) return fail(DYNE_ERR_INVALID, "out is null");   \
    return guarded([&] { *out = (expr); });                             \
  }

DYNE_RESULT_GET(dyne_result_n_samples, uint64_t, result->stats.n_samples)
DYNE_RESULT_GET(dyne_result_failed_count, uint64_t, result->stats.failed_count)
DYNE_RESULT_GET(dyne_result_holevo, double, result->stats.holevo_variance)
DYNE_RESULT_GET(dyne_result_holevo_stderr, double, result->stats.stderr_holevo)
DYNE_RESULT_GET(dyne_result_wrapped, double, result->stats.wrapped_variance)
DYNE_RESULT_GET(dyne_result_mean_error, double, result->stats.mean_error)
DYNE_RESULT_GET(dyne_result_n_trajectories, uint64_t,
                static_cast<uint64_t>(result->outcomes.size()))
DYNE_RESULT_GET(dyne_result_ratio_to_limit, double,
                dyne::run_ratio_to_limit(
                    dyne::RunResult{result->cfg, result->stats}))

#undef DYNE_RESULT_GET

int dyne_result_trajectory(const dyne_result* result, uint64_t index,
                           double* true_phase, double* theta_hat,
                           double* wrapped_error, int* failed) {
  if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null");
  if (index >= result->outcomes.size()) {
    return fail(DYNE_ERR_INVALID, "trajectory index out of range");
  }
  const auto& o = result->outcomes[index];
  if (true_phase != nullptr) *true_phase = o.true_phase;
  if (theta_hat != nullptr) *theta_hat = o.theta_hat;
  if (wrapped_error != nullptr) *wrapped_error = o.wrapped_error;
  if (failed != nullptr) *failed = o.failed ? 1 : 0;
  set_error("");
  return DYNE_OK;
}

int dyne_result_zeta(const dyne_result* result, uint64_t index,
                     double* nbar_est, double* zeta_re, double* zeta_im) {
  if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null");
  if (index >= result->outcomes.size()) {
    return fail(DYNE_ERR_INVALID, "trajectory index out of range");
  }
  const auto& o = result->outcomes[index];
  if (!o.zeta_valid) {
    return fail(DYNE_ERR_DOMAIN, "record is degenerate; zeta undefined");
  }
  if (nbar_est != nullptr) *nbar_est = o.zeta_diag.nbar_est;
  if (zeta_re != nullptr) *zeta_re = o.zeta_diag.zeta.real();
  if (zeta_im != nullptr) *zeta_im = o.zeta_diag.zeta.imag();
  set_error("");
  return DYNE_OK;
}

int dyne_result_zeta_excess(const dyne_result* result,
                            double* from_modulus_ratio,
                            double* from_phase_ratio, double* fraction_below) {
  if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null");
  return guarded([&] {
    const dyne::ZetaScatter& scatter = result->get_scatter();
    if (scatter.points.empty()) {
      throw std::domain_error("no valid zeta points in the ensemble");
    }
    const dyne::ZetaExcess ex =
        dyne::zeta_excess_ratios(scatter, result->cfg.nbar);
    if (from_modulus_ratio != nullptr) *from_modulus_ratio = ex.from_modulus_ratio;
    if (from_phase_ratio != nullptr) *from_phase_ratio = ex.from_phase_ratio;
    if (fraction_below != nullptr) *fraction_below = scatter.fraction_below_optimum;
  });
}

int dyne_result_write_summary_csv(const dyne_result* result, const char* path) {
  if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null");
  if (path == nullptr) return fail(DYNE_ERR_INVALID, "path is null");
  return guarded([&] {
    const dyne::RunResult run{result->cfg, result->stats};
    dyne::write_text_file(path, dyne::summary_csv(result->cfg, {run}));
  });
}

int dyne_result_write_trajectory_csv(const dyne_result* result,
                                     const char* path) {
  if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null");
  if (path == nullptr) return fail(DYNE_ERR_INVALID, "path is null");
  return guarded([&] {
    dyne::write_text_file(path,
                          dyne::trajectory_csv(result->cfg, result->outcomes));
  });
}

int dyne_result_write_summary_json(const dyne_result* result, const char* path,
                                   int with_timestamp) {
  if (result == nullptr) return fail(DYNE_ERR_INVALID, "result is null");
  if (path == nullptr) return fail(DYNE_ERR_INVALID, "path is null");
  return guarded([&] {
    const dyne::RunResult run{result->cfg, result->stats};
    dyne::write_text_file(path, dyne::summary_json(run, with_timestamp != 0));
  });
}

namespace {

dyne::RunResult to_run_result(const dyne_result* r, bool with_zeta) {
  dyne::RunResult run{r->cfg, r->stats};
  if (with_zeta) {
    const dyne::ZetaScatter& scatter = r->get_scatter();
    if (!scatter.points.empty()) {
      const dyne::ZetaExcess ex = dyne::zeta_excess_ratios(scatter, r->cfg.nbar);
      run.have_zeta = true;
      run.excess_mod_ratio = ex.from_modulus_ratio;
      run.excess_phase_ratio = ex.from_phase_ratio;
    }
  }
  return run;
}

bool parse_plot_kind(const std::string& k, dyne::PlotKind* pk) {
  if (k == "variance-vs-nbar") {
    *pk = dyne::PlotKind::kVarianceVsNbar;
  } else if (k == "ratio") {
    *pk = dyne::PlotKind::kRatio;
  } else if (k == "zeta-scatter") {
    *pk = dyne::PlotKind::kZetaScatter;
  } else if (k == "contributions") {
    *pk = dyne::PlotKind::kContributions;
  } else {
    return false;
  }
  return true;
}

bool parse_state_kind(const std::string& k, dyne::StateKind* sk) {
  if (k == "coherent") {
    *sk = dyne::StateKind::kCoherent;
  } else if (k == "optimal_squeezed") {
    *sk = dyne::StateKind::kOptimalSqueezed;
  } else {
    return false;
  }
  return true;
}

}  // namespace

int dyne_results_write_summary_csv(const dyne_result* const* results, size_t n,
                                   const char* path) {
  if (results == nullptr || n == 0) {
    return fail(DYNE_ERR_INVALID, "results are null or empty");
  }
  if (path == nullptr) return fail(DYNE_ERR_INVALID, "path is null");
  for (size_t i = 0; i < n; ++i) {
    if (results[i] == nullptr) return fail(DYNE_ERR_INVALID, "null result");
  }
  return guarded([&] {
    std::vector<dyne::RunResult> runs;
    runs.reserve(n);
    for (size_t i = 0; i < n; ++i) runs.push_back(to_run_result(results[i], false));
    dyne::write_text_file(path, dyne::summary_csv(results[0]->cfg, runs));
  });
}

int dyne_results_write_zeta_excess_csv(const dyne_result* const* results,
                                       size_t n, const char* path) {
  if (results == nullptr || n == 0) {
    return fail(DYNE_ERR_INVALID, "results are null or empty");
  }
  if (path == nullptr) return fail(DYNE_ERR_INVALID, "path is null");
  for (size_t i = 0; i < n; ++i) {
    if (results[i] == nullptr) return fail(DYNE_ERR_INVALID, "null result");
  }
  return guarded([&] {
    std::vector<dyne::RunResult> runs;
    runs.reserve(n);
    for (size_t i = 0; i < n; ++i) runs.push_back(to_run_result(results[i], true));
    dyne::write_text_file(path,
                          dyne::zeta_excess_csv(results[0]->cfg, runs));
  });
}

int dyne_emit_plots(const dyne_result* const* results, size_t n,
                    const char* kind, const char* out_dir, const double* fit) {
  if (results == nullptr || n == 0) {
    return fail(DYNE_ERR_INVALID, "results are null or empty");
  }
  if (kind == nullptr || out_dir == nullptr) {
    return fail(DYNE_ERR_INVALID, "kind or out_dir is null");
  }
  for (size_t i = 0; i < n; ++i) {
    if (results[i] == nullptr) return fail(DYNE_ERR_INVALID, "null result");
  }
  dyne::PlotKind pk;
  if (!parse_plot_kind(kind, &pk)) {
    return fail(DYNE_ERR_INVALID,
                "unknown plot kind '" + std::string(kind) + "'");
  }
  return guarded([&] {
    const bool with_zeta = pk == dyne::PlotKind::kContributions;
    std::vector<dyne::RunResult> runs;
    runs.reserve(n);
    for (size_t i = 0; i < n; ++i) runs.push_back(to_run_result(results[i], with_zeta));

    dyne::FitResult fit_result;
    const dyne::FitResult* fit_ptr = nullptr;
    if (fit != nullptr) {
      fit_result.exponent = fit[0];
      fit_result.prefactor = fit[1];
      fit_ptr = &fit_result;
    }
    if (pk == dyne::PlotKind::kZetaScatter) {
      const dyne::ZetaScatter& scatter = results[0]->get_scatter();
      dyne::emit_plot_data(out_dir, pk, runs, &scatter, nullptr);
    } else {
      dyne::emit_plot_data(out_dir, pk, runs, nullptr, fit_ptr);
    }
  });
}

int dyne_emit_plots_from_file(const char* kind, const char* in_path,
                              const char* out_dir, const char* state_kind,
                              const double* fit) {
  if (kind == nullptr || in_path == nullptr || out_dir == nullptr) {
    return fail(DYNE_ERR_INVALID, "kind, in_path, or out_dir is null");
  }
  dyne::PlotKind pk;
  if (!parse_plot_kind(kind, &pk)) {
    return fail(DYNE_ERR_INVALID,
                "unknown plot kind '" + std::string(kind) + "'");
  }
  dyne::StateKind sk = dyne::StateKind::kOptimalSqueezed;
  if (state_kind != nullptr && !parse_state_kind(state_kind, &sk)) {
    return fail(DYNE_ERR_INVALID,
                "unknown state kind '" + std::string(state_kind) + "'");
  }
  return guarded([&] {
    const std::string text = dyne::read_text_file(in_path);
    dyne::FitResult fit_result;
    const dyne::FitResult* fit_ptr = nullptr;
    if (fit != nullptr) {
      fit_result.exponent = fit[0];
      fit_result.prefactor = fit[1];
      fit_ptr = &fit_result;
    }
    switch (pk) {
      case dyne::PlotKind::kVarianceVsNbar:
      case dyne::PlotKind::kRatio: {
        const auto runs = dyne::parse_summary_csv(text, sk);
        dyne::emit_plot_data(out_dir, pk, runs, nullptr, fit_ptr);
        return;
      }
      case dyne::PlotKind::kZetaScatter: {
        const dyne::ZetaScatter scatter = dyne::parse_trajectory_csv_zeta(text);
        dyne::emit_plot_data(out_dir, pk, {}, &scatter, nullptr);
        return;
      }
      case dyne::PlotKind::kContributions: {
        const auto runs = dyne::parse_zeta_excess_csv(text);
        dyne::emit_plot_data(out_dir, pk, runs, nullptr, nullptr);
        return;
      }
    }
  });
}

int dyne_summary_read(const char* path, const char* state_kind, double* nbar,
                      double* holevo, double* intrinsic, size_t cap,
                      size_t* n_rows) {
  if (path == nullptr) return fail(DYNE_ERR_INVALID, "path is null");
  if (n_rows == nullptr) return fail(DYNE_ERR_INVALID, "n_rows is null");
  dyne::StateKind sk = dyne::StateKind::kOptimalSqueezed;
  if (state_kind != nullptr && !parse_state_kind(state_kind, &sk)) {
    return fail(DYNE_ERR_INVALID,
                "unknown state kind '" + std::string(state_kind) + "'");
  }
  return guarded([&] {
    const auto runs = dyne::parse_summary_csv(dyne::read_text_file(path), sk);
    *n_rows = runs.size();
    const size_t n = std::min(cap, runs.size());
    for (size_t i = 0; i < n; ++i) {
      if (nbar != nullptr) nbar[i] = runs[i].config.nbar;
      if (holevo != nullptr) holevo[i] = runs[i].stats.holevo_variance;
      if (intrinsic != nullptr) intrinsic[i] = dyne::input_intrinsic(runs[i].config);
    }
  });
}

/* ---------- fitting ---------- */

int dyne_power_law_fit(const double* nbar, const double* variance, size_t n,
                       double* exponent, double* prefactor,
                       double* exponent_stderr, double* r_squared) {
  if (nbar == nullptr || variance == nullptr) {
    return fail(DYNE_ERR_INVALID, "input arrays are null");
  }
  return guarded([&] {
    std::vector<std::pair<double, double>> points(n);
    for (size_t i = 0; i < n; ++i) points[i] = {nbar[i], variance[i]};
    const dyne::FitResult fit = dyne::power_law_fit(points);
    if (exponent != nullptr) *exponent = fit.exponent;
    if (prefactor != nullptr) *prefactor = fit.prefactor;
    if (exponent_stderr != nullptr) *exponent_stderr = fit.exponent_stderr;
    if (r_squared != nullptr) *r_squared = fit.r_squared;
  });
}

/* ---------- reproduction presets ---------- */

int dyne_preset_count(void) {
  return static_cast<int>(dyne::preset_names().size());
}

int dyne_preset_name(int index, char* buf, size_t cap) {
  const auto names = dyne::preset_names();
  if (index < 0 || index >= static_cast<int>(names.size())) {
    return fail(DYNE_ERR_INVALID, "preset index out of range");
  }
  return copy_out(names[static_cast<size_t>(index)], buf, cap);
}

int dyne_preset_description(const char* name, char* buf, size_t cap) {
  if (name == nullptr) return fail(DYNE_ERR_INVALID, "name is null");
  const auto preset = dyne::find_preset(name);
  if (!preset) {
    return fail(DYNE_ERR_INVALID, "unknown preset '" + std::string(name) + "'");
  }
  return copy_out(preset->description, buf, cap);
}

int dyne_reproduce(const char* name, unsigned workers, char* buf, size_t cap,
                   int* passed) {
  if (name == nullptr) return fail(DYNE_ERR_INVALID, "name is null");
  const auto preset = dyne::find_preset(name);
  if (!preset) {
    std::string known;
    for (const auto& n : dyne::preset_names()) {
      if (!known.empty()) known += ", ";
      known += n;
    }
    return fail(DYNE_ERR_INVALID,
                "unknown preset '" + std::string(name) + "'; available: " + known);
  }
  return guarded([&] {
    const dyne::ReproduceReport rep = dyne::run_reproduce(*preset, workers);
    if (passed != nullptr) *passed = rep.passed ? 1 : 0;
    if (buf != nullptr && cap > 0) {
      const size_t n = std::min(cap - 1, rep.text.size());
      std::memcpy(buf, rep.text.data(), n);
      buf[n] = '\0';
    }
  });
}

}  // extern "C"
