#include "core/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "json.hpp"

namespace dyne {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

double input_intrinsic(const SimConfig& config) {
  const SqueezedState state = make_initial_state(config);
  const double nbar_total = mean_photon(state);
  const double n0 = nbar_total * std::exp(-2.0 * std::abs(state.xi));
  return intrinsic_phase_variance(nbar_total, n0);
}

double run_ratio_to_limit(const RunResult& result) {
  const double denom = 2.0 * input_intrinsic(result.config);
  if (!(denom > 0.0)) {
    throw std::domain_error("run_ratio_to_limit: nonpositive intrinsic");
  }
  return result.stats.holevo_variance / denom;
}

std::string provenance_preamble(const SimConfig& config) {
  std::string out;
  out += "# version=";
  out += kVersion;
  out += "\n# seed=" + std::to_string(config.master_seed);
  out += "\n# config_hash=" + fmt_hash(config_hash(config)) + "\n";
  return out;
}

std::string summary_csv_header() {
  return "nbar,policy,params,n_traj,dv_feedback,substeps,holevo_var,"
         "holevo_stderr,wrapped_var,mean_error,failed_count,ratio_to_limit\n";
}

std::string summary_csv_row(const RunResult& result) {
  const SimConfig& c = result.config;
  const EnsembleStats& s = result.stats;
  std::string row;
  row += fmt(c.nbar);
  row += ',' + policy_name(c.policy);
  row += ",\"" + policy_params(c.policy) + "\"";
  row += ',' + std::to_string(c.n_trajectories);
  row += ',' + fmt(resolved_dv(c));
  row += ',' + std::to_string(c.substeps);
  row += ',' + fmt(s.holevo_variance);
  row += ',' + fmt(s.stderr_holevo);
  row += ',' + fmt(s.wrapped_variance);
  row += ',' + fmt(s.mean_error);
  row += ',' + std::to_string(s.failed_count);
  row += ',' + fmt(run_ratio_to_limit(result));
  row += '\n';
  return row;
}

std::string summary_csv(const SimConfig& base,
                        const std::vector<RunResult>& results) {
  std::string out = provenance_preamble(base) + summary_csv_header();
  for (const auto& r : results) out += summary_csv_row(r);
  return out;
}

std::string trajectory_csv(const SimConfig& config,
                           const std::vector<TrajectoryOutcome>& outcomes) {
  std::string out = provenance_preamble(config);
  out +=
      "index,true_phase,theta_hat,wrapped_error,failed,zeta_valid,"
      "nbar_est,zeta_real,zeta_imag\n";
  for (const auto& o : outcomes) {
    out += std::to_string(o.trajectory_index);
    out += ',' + fmt(o.true_phase);
    out += ',' + fmt(o.theta_hat);
    out += ',' + fmt(o.wrapped_error);
    out += ',' + std::string(o.failed ? "1" : "0");
    out += ',' + std::string(o.zeta_valid ? "1" : "0");
    if (o.zeta_valid) {
      out += ',' + fmt(o.zeta_diag.nbar_est);
      out += ',' + fmt(o.zeta_diag.zeta.real());
      out += ',' + fmt(o.zeta_diag.zeta.imag());
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const RunResult& result, bool with_timestamp) {
  nlohmann::json j;
  j["provenance"] = {
      {"version", kVersion},
      {"seed", result.config.master_seed},
      {"config_hash", fmt_hash(config_hash(result.config))}};
  if (with_timestamp) j["provenance"]["timestamp"] = utc_timestamp();
  j["config"] = nlohmann::json::parse(config_to_json(result.config));
  j["dv_feedback_resolved"] = resolved_dv(result.config);

  const EnsembleStats& s = result.stats;
  j["stats"] = {{"n_samples", s.n_samples},
                {"holevo_variance", s.holevo_variance},
                {"wrapped_variance", s.wrapped_variance},
                {"mean_error", s.mean_error},
                {"stderr_holevo", s.stderr_holevo},
                {"stderr_method", "jackknife-50"},
                {"failed_count", s.failed_count}};

  const double intr = input_intrinsic(result.config);
  j["reference"] = {{"intrinsic", intr},
                    {"theoretical_limit", theoretical_limit(result.config.nbar)},
                    {"ratio_to_limit", run_ratio_to_limit(result)}};
  if (result.have_zeta) {
    j["zeta_excess"] = {{"from_modulus_ratio", result.excess_mod_ratio},
                        {"from_phase_ratio", result.excess_phase_ratio}};
  }
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing: " +
                  std::strerror(errno));
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError("write to '" + path + "' failed: " + std::strerror(errno));
  }
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void emit_variance_vs_nbar(const std::string& out_dir,
                           const std::vector<RunResult>& results,
                           const FitResult* fit) {
  std::string dat =
      "# variance vs mean photon number, with reference curves\n"
      "# columns: nbar holevo_var holevo_stderr heterodyne_ref mark2_ref "
      "limit_ref";
  if (fit) dat += " fit_ref";
  dat += '\n';
  for (const auto& r : results) {
    const double nb = r.config.nbar;
    dat += fmt(nb) + ' ' + fmt(r.stats.holevo_variance) + ' ' +
           fmt(r.stats.stderr_holevo) + ' ' +
           fmt(heterodyne_introduced(nb) + input_intrinsic(r.config)) + ' ' +
           fmt(markII_introduced(nb) + input_intrinsic(r.config)) + ' ' +
           fmt(theoretical_limit(nb));
    if (fit) dat += ' ' + fmt(fit->prefactor * std::pow(nb, -fit->exponent));
    dat += '\n';
  }
  write_text_file(join(out_dir, "variance_vs_nbar.dat"), dat);

  std::string recipe =
      "plot: variance_vs_nbar.dat\n"
      "x: column 1 (nbar), log scale\n"
      "y: columns 2 (measured, with errorbars from column 3), 4 (heterodyne "
      "reference), 5 (mark II reference), 6 (theoretical limit)";
  if (fit) recipe += ", 7 (power-law fit)";
  recipe +=
      ", log scale\n"
      "in order from top to bottom at large nbar: heterodyne, mark II, "
      "fit, theoretical limit\n";
  write_text_file(join(out_dir, "variance_vs_nbar.recipe.txt"), recipe);
}

void emit_ratio(const std::string& out_dir,
                const std::vector<RunResult>& results) {
  std::string dat =
      "# variance as a ratio to twice the intrinsic variance of the input\n"
      "# columns: nbar ratio stderr_ratio\n";
  for (const auto& r : results) {
    const double denom = 2.0 * input_intrinsic(r.config);
    dat += fmt(r.config.nbar) + ' ' + fmt(run_ratio_to_limit(r)) + ' ' +
           fmt(r.stats.stderr_holevo / denom) + '\n';
  }
  write_text_file(join(out_dir, "ratio_vs_nbar.dat"), dat);
  write_text_file(
      join(out_dir, "ratio_vs_nbar.recipe.txt"),
      "plot: ratio_vs_nbar.dat\n"
      "x: column 1 (nbar), log scale\n"
      "y: column 2 (ratio to the theoretical minimum phase variance), "
      "errorbars from column 3, linear scale\n"
      "reference: horizontal line at y = 1\n");
}

void emit_zeta_scatter(const std::string& out_dir, const ZetaScatter& scatter) {
  std::string dat =
      "# per-trajectory squeezing recovered from the final record\n"
      "# columns: nbar_est zeta_real zeta_arg_about_optimum\n";
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& p : scatter.points) {
    dat += fmt(p.nbar_est) + ' ' + fmt(p.zeta_real) + ' ' + fmt(p.zeta_arg) +
           '\n';
    if (first || p.nbar_est < lo) lo = p.nbar_est;
    if (first || p.nbar_est > hi) hi = p.nbar_est;
    first = false;
  }
  write_text_file(join(out_dir, "zeta_scatter.dat"), dat);

  std::string line =
      "# optimal squeezing for each mean photon number\n"
      "# columns: nbar zeta_opt\n";
  if (!first) {
    const double a = std::log(lo * 0.8);
    const double b = std::log(hi * 1.25);
    constexpr int kPoints = 64;
    for (int i = 0; i < kPoints; ++i) {
      const double nb = std::exp(a + (b - a) * i / (kPoints - 1));
      const double n0 = optimal_n0(nb);
      if (!(n0 > 0.0)) continue;
      line += fmt(nb) + ' ' + fmt(0.5 * std::log(n0 / nb)) + '\n';
    }
  }
  write_text_file(join(out_dir, "zeta_optimum.dat"), line);
  write_text_file(
      join(out_dir, "zeta_scatter.recipe.txt"),
      "plot: zeta_scatter.dat as points, zeta_optimum.dat as a line\n"
      "x: column 1 (nbar), log scale\n"
      "y: column 2 (zeta_R), linear scale\n"
      "the optimum-squeezing line comes from zeta_optimum.dat columns 1-2\n");
}

void emit_contributions(const std::string& out_dir,
                        const std::vector<RunResult>& results) {
  std::string dat =
      "# excess-variance contributions from the zeta scatter, as ratios to "
      "the minimum phase variance\n"
      "# columns: nbar excess_from_modulus excess_from_phase\n";
  bool any = false;
  for (const auto& r : results) {
    if (!r.have_zeta) continue;
    any = true;
    dat += fmt(r.config.nbar) + ' ' + fmt(r.excess_mod_ratio) + ' ' +
           fmt(r.excess_phase_ratio) + '\n';
  }
  if (!any) {
    throw std::invalid_argument(
        "emit_plot_data: contributions need zeta-analyzed results");
  }
  write_text_file(join(out_dir, "contributions.dat"), dat);
  write_text_file(
      join(out_dir, "contributions.recipe.txt"),
      "plot: contributions.dat\n"
      "x: column 1 (nbar), log scale\n"
      "y: columns 2 (from |zeta| error, continuous) and 3 (from arg zeta "
      "error, dash-dotted), log scale\n");
}

}  // namespace

void emit_plot_data(const std::string& out_dir, PlotKind kind,
                    const std::vector<RunResult>& results,
                    const ZetaScatter* scatter, const FitResult* fit) {
  if (kind == PlotKind::kZetaScatter) {
    if (!scatter || scatter->points.empty()) {
      throw std::invalid_argument("emit_plot_data: empty zeta scatter");
    }
  } else if (results.empty()) {
    throw std::invalid_argument("emit_plot_data: no results");
  }
  ensure_dir(out_dir);
  switch (kind) {
    case PlotKind::kVarianceVsNbar:
      emit_variance_vs_nbar(out_dir, results, fit);
      return;
    case PlotKind::kRatio:
      emit_ratio(out_dir, results);
      return;
    case PlotKind::kZetaScatter:
      emit_zeta_scatter(out_dir, *scatter);
      return;
    case PlotKind::kContributions:
      emit_contributions(out_dir, results);
      return;
  }
  throw std::logic_error("emit_plot_data: unknown kind");
}

namespace {

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

// Splits one CSV row; a field may be wrapped in double quotes (the params
// field is, since policy parameters can contain commas).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double field_number(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": not a number: '" + s +
                                "'");
  }
  if (pos != s.size()) {
    throw std::invalid_argument(std::string(what) + ": trailing junk in '" +
                                s + "'");
  }
  return value;
}

}  // namespace

std::vector<RunResult> parse_summary_csv(const std::string& text,
                                         StateKind state_kind) {
  const std::vector<std::string> lines = data_lines(text);
  if (lines.empty()) {
    throw std::invalid_argument("summary CSV: no header line");
  }
  std::string expected = summary_csv_header();
  expected.pop_back();  // trailing newline
  if (lines.front() != expected) {
    throw std::invalid_argument("summary CSV: unrecognized header '" +
                                lines.front() + "'");
  }
  std::vector<RunResult> results;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::vector<std::string> f = split_csv(lines[li]);
    if (f.size() != 12) {
      throw std::invalid_argument("summary CSV: row " + std::to_string(li) +
                                  " has " + std::to_string(f.size()) +
                                  " fields, expected 12");
    }
    RunResult r;
    r.config.nbar = field_number(f[0], "nbar");
    r.config.state_kind = state_kind;
    r.config.policy =
        parse_policy(f[2].empty() ? f[1] : f[1] + ":" + f[2]);
    r.config.n_trajectories =
        static_cast<std::uint64_t>(field_number(f[3], "n_traj"));
    r.config.dv_feedback = field_number(f[4], "dv_feedback");
    r.config.paper_rule = false;
    r.config.substeps = static_cast<int>(field_number(f[5], "substeps"));
    r.stats.holevo_variance = field_number(f[6], "holevo_var");
    r.stats.stderr_holevo = field_number(f[7], "holevo_stderr");
    r.stats.wrapped_variance = field_number(f[8], "wrapped_var");
    r.stats.mean_error = field_number(f[9], "mean_error");
    r.stats.failed_count =
        static_cast<std::uint64_t>(field_number(f[10], "failed_count"));
    r.stats.n_samples = r.config.n_trajectories - r.stats.failed_count;
    results.push_back(std::move(r));
  }
  return results;
}

ZetaScatter parse_trajectory_csv_zeta(const std::string& text) {
  const std::vector<std::string> lines = data_lines(text);
  if (lines.empty()) {
    throw std::invalid_argument("trajectory CSV: no header line");
  }
  if (lines.front().rfind("index,true_phase,", 0) != 0) {
    throw std::invalid_argument("trajectory CSV: unrecognized header '" +
                                lines.front() + "'");
  }
  std::vector<TrajectoryOutcome> outcomes;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::vector<std::string> f = split_csv(lines[li]);
    if (f.size() != 9) {
      throw std::invalid_argument("trajectory CSV: row " +
                                  std::to_string(li) + " has " +
                                  std::to_string(f.size()) +
                                  " fields, expected 9");
    }
    TrajectoryOutcome o;
    o.trajectory_index = static_cast<std::uint64_t>(field_number(f[0], "index"));
    o.true_phase = field_number(f[1], "true_phase");
    o.theta_hat = field_number(f[2], "theta_hat");
    o.wrapped_error = field_number(f[3], "wrapped_error");
    o.failed = f[4] == "1";
    o.zeta_valid = f[5] == "1";
    if (o.zeta_valid) {
      o.zeta_diag.nbar_est = field_number(f[6], "nbar_est");
      o.zeta_diag.zeta =
          cplx(field_number(f[7], "zeta_real"), field_number(f[8], "zeta_imag"));
    }
    outcomes.push_back(o);
  }
  return zeta_scatter(outcomes);
}

std::string zeta_excess_csv(const SimConfig& config,
                            const std::vector<RunResult>& results) {
  std::string out = provenance_preamble(config);
  out += "nbar,excess_from_modulus,excess_from_phase\n";
  for (const auto& r : results) {
    if (!r.have_zeta) continue;
    out += fmt(r.config.nbar) + ',' + fmt(r.excess_mod_ratio) + ',' +
           fmt(r.excess_phase_ratio) + '\n';
  }
  return out;
}

std::vector<RunResult> parse_zeta_excess_csv(const std::string& text) {
  const std::vector<std::string> lines = data_lines(text);
  if (lines.empty() ||
      lines.front() != "nbar,excess_from_modulus,excess_from_phase") {
    throw std::invalid_argument("zeta-excess CSV: unrecognized header");
  }
  std::vector<RunResult> results;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::vector<std::string> f = split_csv(lines[li]);
    if (f.size() != 3) {
      throw std::invalid_argument("zeta-excess CSV: row " +
                                  std::to_string(li) + " needs 3 fields");
    }
    RunResult r;
    r.config.nbar = field_number(f[0], "nbar");
    r.have_zeta = true;
    r.excess_mod_ratio = field_number(f[1], "excess_from_modulus");
    r.excess_phase_ratio = field_number(f[2], "excess_from_phase");
    results.push_back(std::move(r));
  }
  return results;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading: " +
                  std::strerror(errno));
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read from '" + path + "' failed: " + std::strerror(errno));
  }
  return content;
}

}  // namespace dyne
