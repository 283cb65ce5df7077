#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "core/policy.hpp"
#include "core/record.hpp"
#include "core/rng.hpp"
#include "core/squeezed.hpp"

namespace dyne {

// Feedback-update interval, integration substeps per interval, and end
// time. Feedback is sample-and-hold: Φ is recomputed from the record only
// at interval boundaries and shared by the substeps in between.
struct TimeGrid {
  double dv_feedback = 1e-3;
  int substeps = 1;
  double v_end = 1.0;
};

// Conditioned system state in scaled variables: the scaled mean amplitude
// α_v^S and the (immutable) initial squeezing B_0^S. The running B_v^S is
// recovered from the record through the closed form and never stored.
struct SystemState {
  cplx alpha_v{0.0, 0.0};
  cplx b0_lin{0.0, 0.0};
  double v = 0.0;
};

struct TrajectoryOutcome {
  DyneRecord final_record;
  double theta_hat = 0.0;       // arg C of the final record
  double wrapped_error = 0.0;   // wrap(theta_hat - true_phase)
  double true_phase = 0.0;
  ZetaDecomposition zeta_diag;  // POM decomposition of the final record
  bool zeta_valid = false;      // false when the final record is degenerate
  std::uint64_t trajectory_index = 0;
  bool failed = false;          // undefined final estimate or state blowup
};

// Thrown when |B_v^S| reaches 1 during integration (infinite squeezing of
// the conditioned state); carries the step at which it happened.
class StateBlowupError : public std::runtime_error {
 public:
  StateBlowupError(std::uint64_t step)
      : std::runtime_error("conditioned state blew up (|B_v^S| -> 1)"),
        step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

// Closed-form solution B_v^S = (1-v)/((B_0^S)^{-1} - B_v*); exactly zero
// for coherent states (b0_lin = 0), with no division taken.
cplx closed_form_Bs(cplx b0_lin, cplx B_v, double v);

// One Euler-Maruyama update of the scaled amplitude,
//   dα_v^S = [B_v^S/(1-v)] [(B_v^S)* e^{iΦ} + e^{-iΦ}] / (1-|B_v^S|²) dW,
// with B_v^S/(1-v) evaluated as 1/((B_0^S)^{-1} - B_v*) so the v -> 1
// singularity cancels analytically. The record supplies the pre-update
// (B_v, v); the same dW must have produced this step's signal increment.
void step_alpha(SystemState& state, const DyneRecord& record, double Phi,
                double dW, double dv);

// Final phase estimate arg(C) of a completed record; throws
// std::domain_error when C = 0 (undefined estimate).
double final_estimate(const DyneRecord& record);

// Optional per-trajectory trace, called at every feedback update with
// (v, Φ, |A|, |B|, arg C).
using TraceSink =
    std::function<void(double v, double Phi, double abs_A, double abs_B,
                       double arg_C)>;

// Integrate one measurement trajectory: the input state (rotated by
// true_phase), the chosen feedback policy, and the grid. Throws
// StateBlowupError on conditioned-state blowup; an undefined final
// estimate is reported via the `failed` flag instead.
TrajectoryOutcome run_trajectory(const SqueezedState& initial,
                                 double true_phase,
                                 const FeedbackPolicy& policy,
                                 const TimeGrid& grid, NoiseStream& rng,
                                 const TraceSink* trace = nullptr);

}  // namespace dyne
