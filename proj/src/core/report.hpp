#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/stats.hpp"

namespace dyne {

// A file write that could not be completed; message carries the path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// One summarized ensemble run, ready for emission. The ζ-excess ratios are
// filled in only when the run's scatter has been analyzed.
struct RunResult {
  SimConfig config;
  EnsembleStats stats;
  bool have_zeta = false;
  double excess_mod_ratio = 0.0;
  double excess_phase_ratio = 0.0;
};

// Intrinsic phase variance of the configured input state (Collett form).
double input_intrinsic(const SimConfig& config);

// holevo_variance / (2 · intrinsic of the input state) — the y-axis of the
// near-limit comparison plots.
double run_ratio_to_limit(const RunResult& result);

// Provenance preamble shared by all text outputs: version, seed, and the
// config hash, as '#' comment lines. Deliberately timestamp-free so that
// re-runs are byte-identical.
std::string provenance_preamble(const SimConfig& config);

// Fixed summary-CSV schema.
std::string summary_csv_header();
std::string summary_csv_row(const RunResult& result);
std::string summary_csv(const SimConfig& base,
                        const std::vector<RunResult>& results);

// Per-trajectory detail CSV.
std::string trajectory_csv(const SimConfig& config,
                           const std::vector<TrajectoryOutcome>& outcomes);

// JSON summary of one run; the timestamp lives only under "provenance".
std::string summary_json(const RunResult& result, bool with_timestamp = true);

// Writes content to path, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

// Columnar .dat emission for the four figure families, each with a plain
//-text recipe describing axes and reference curves.
enum class PlotKind { kVarianceVsNbar, kRatio, kZetaScatter, kContributions };

void emit_plot_data(const std::string& out_dir, PlotKind kind,
                    const std::vector<RunResult>& results,
                    const ZetaScatter* scatter = nullptr,
                    const FitResult* fit = nullptr);

// Inverses of the CSV writers, so persisted results can be re-plotted.
// Summary rows become RunResults under the given state kind (the summary
// schema does not record it). Throws std::invalid_argument on malformed
// input.
std::vector<RunResult> parse_summary_csv(const std::string& text,
                                         StateKind state_kind);

// Rebuilds the ζ scatter from a trajectory CSV; rows without a valid ζ are
// skipped and counted.
ZetaScatter parse_trajectory_csv_zeta(const std::string& text);

// ζ-excess table, one row per analyzed run: nbar plus the two excess
// ratios. Parsed back into zeta-carrying RunResults for the contributions
// plot.
std::string zeta_excess_csv(const SimConfig& config,
                            const std::vector<RunResult>& results);
std::vector<RunResult> parse_zeta_excess_csv(const std::string& text);

// Reads a whole file, throwing IoError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace dyne
