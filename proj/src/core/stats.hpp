#pragma once

#include <cstdint>
#include <vector>

#include "core/sde.hpp"

namespace dyne {

// Circular-statistics summary of one ensemble. Failed trajectories are
// excluded from every estimate and only counted.
struct EnsembleStats {
  std::uint64_t n_samples = 0;      // trajectories that produced an estimate
  double holevo_variance = 0.0;     // |N⁻¹ Σ e^{iθ}|⁻² − 1
  double wrapped_variance = 0.0;    // N⁻¹ Σ θ², θ wrapped to (−π, π]
  double mean_error = 0.0;          // plain mean of wrapped errors
  double stderr_holevo = 0.0;       // jackknife over batches (see below)
  std::uint64_t failed_count = 0;
};

// Least-squares power law V = prefactor · n̄^(−exponent) in log–log space.
struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double exponent_stderr = 0.0;
  double r_squared = 0.0;
};

// Per-trajectory (n̄, ζ) recovered from final records, with the rms
// deviations used by the excess-variance diagnostics. zeta_arg stores
// arg(−ζ): the optimum lies on the negative real axis, so phase deviation
// about the optimum is a small angle around zero.
struct ZetaScatterPoint {
  double nbar_est = 0.0;
  double zeta_real = 0.0;
  double zeta_arg = 0.0;
};

struct ZetaScatter {
  std::vector<ZetaScatterPoint> points;
  double rms_dev_modulus = 0.0;  // rms of |ζ| − |ζ_opt(n̄_est)|
  double rms_dev_phase = 0.0;    // rms of arg(−ζ) about zero
  std::uint64_t skipped_count = 0;
  // Fraction of points with ζ_R below the optimal-ζ curve at their n̄_est.
  double fraction_below_optimum = 0.0;
};

// (theta_hat − true_phase) wrapped to (−π, π].
double wrap_error(double theta_hat, double true_phase);

// Holevo phase variance |N⁻¹ Σ e^{iθ}|⁻² − 1. A zero resultant has no
// defined variance and is reported as +∞.
double holevo_variance(const std::vector<double>& errors);

// Plain second moment of the wrapped errors about zero.
double wrapped_variance(const std::vector<double>& errors);

// Number of jackknife batches used for stderr estimates.
inline constexpr int kJackknifeBatches = 50;

// Jackknife (leave-one-batch-out over up to kJackknifeBatches contiguous
// batches) standard error of the Holevo variance.
double holevo_stderr_jackknife(const std::vector<double>& errors);

// Full summary of an ensemble's outcomes.
EnsembleStats summarize(const std::vector<TrajectoryOutcome>& outcomes);

// Excess phase variance, as a ratio to the minimum, from rms deviation of
// |ζ| about optimum: (Δ|ζ|)²(1 + 4n₀).
double excess_from_modulus(double rms_dzeta, double n0);

// Excess phase variance (absolute) from rms error in the phase of ζ:
// (Δ arg ζ)²/(16 n₀). Divide by n₀/(4n̄²) for the ratio variant.
double excess_from_phase(double rms_arg_zeta, double n0);

// Fit V = c·n̄^(−p) by least squares on (ln n̄, ln V); ≥ 3 points for a
// meaningful stderr.
FitResult power_law_fit(const std::vector<std::pair<double, double>>& points);

// Collect the ζ scatter of an ensemble; degenerate records are skipped and
// counted.
ZetaScatter zeta_scatter(const std::vector<TrajectoryOutcome>& outcomes);

// Both scatter-based excess contributions as ratios to the minimum phase
// variance n₀/(4n̄²) of the nominal photon number.
struct ZetaExcess {
  double from_modulus_ratio = 0.0;
  double from_phase_ratio = 0.0;
};

ZetaExcess zeta_excess_ratios(const ZetaScatter& scatter, double nbar);

}  // namespace dyne
