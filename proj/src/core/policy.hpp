#pragma once

#include <variant>

#include "core/record.hpp"
#include "core/squeezed.hpp"

namespace dyne {

// The six feedback laws. Estimate-based policies set the local-oscillator
// phase to Φ = φ̂ + π/2; heterodyne sweeps it deterministically; the
// corrected policy switches to a B-steering phase when triggered.
struct Heterodyne {
  double detuning = 500.0;  // radians per unit unscaled time
};
struct MarkI {};
struct MarkII {};
struct ConstantEpsilon {
  double epsilon = 0.5;  // in [0, 1]
};
struct TimeEpsilon {
  double divisor = 1.0;  // >= 1
};
struct Corrected {
  double lambda = 1e-3;   // trigger slack rate, > 0
  double divisor = 1.0;   // >= 1, applied to the epsilon schedule
  double onset_v = 0.9;   // earliest v at which the trigger may fire
};

using FeedbackPolicy =
    std::variant<Heterodyne, MarkI, MarkII, ConstantEpsilon, TimeEpsilon, Corrected>;

// Wrap an angle to (-pi, pi].
double wrap_angle(double theta);

// True when the record's C is numerically meaningless: |C| at or below the
// floating-point roundoff floor of the sums that built it. Under a constant
// feedback phase C vanishes identically (A = e^{iΦ}S with S real makes
// A v + B A* = v e^{iΦ}(S - S*) = 0), so early in a run C is pure roundoff
// and its argument carries no information.
bool record_c_degenerate(const DyneRecord& r);

// Interpolated running estimate φ̂ = arg C + ε wrap(arg A - arg C);
// ε = 0 gives the best estimate arg C, ε = 1 gives arg A, and values
// beyond 1 extrapolate past arg A. Falls back to arg A (or 0) when C
// (or A) is degenerate.
double interp_estimate(const DyneRecord& r, double epsilon);

// Time-dependent schedule ε(v) = [(v² - |B|²)/|C|] sqrt(v/(1-v)) / divisor.
// The first factor estimates 1/|α_v|; the second keeps ε small early and
// large near the end. Falls back to ε = 1 while C is degenerate.
double epsilon_schedule(const DyneRecord& r, double v, double divisor);

// Mid-measurement decomposition used by the corrected policy's trigger:
// α_v = C/(v² - |B|²), n̄ = |α_v|², ζ = -[B e^{-2i arg C}/|B|] atanh(|B|/v).
// Requires v > 0, |B| < v, and nondegenerate C.
ZetaDecomposition zeta_estimate_at(const DyneRecord& r, double v);

// Deterministic heterodyne ramp Φ = -detuning ln(1 - v) (linear in
// unscaled time).
double heterodyne_phase(double v, double detuning);

// The corrected policy: TimeEpsilon feedback until, after onset_v, the
// estimated |ζ| exceeds |ζ_opt| e^{λ n̄ (1-v)}; then the local-oscillator
// phase Φ = ½ arg[B - v (C/C*) tanh|ζ_opt|], which steers B straight
// toward its optimum.
double corrected_phase(const DyneRecord& r, double v, double lambda,
                       double divisor, double onset_v);

// Dispatch on the policy variant; returns Φ wrapped to (-pi, pi].
double feedback_phase(const FeedbackPolicy& p, const DyneRecord& r, double v);

// The same feedback as a unit phasor e^{iΦ}, evaluated with the minimum
// trigonometry: Φ = φ̂ + π/2 becomes a multiplication by i, and the
// estimate's phase comes from the record sums themselves (i·A/|A| for
// mark I/II) rather than angle-then-polar round trips. Agrees with
// polar(1, feedback_phase(...)) to roundoff; the integrator runs on this.
cplx feedback_phasor(const FeedbackPolicy& p, const DyneRecord& r, double v);

}  // namespace dyne
