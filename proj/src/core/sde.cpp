#include "core/sde.hpp"

#include <cmath>

#include "core/policy_detail.hpp"

namespace dyne {

namespace {

// Shared by step_alpha and the trajectory loop so both produce identical
// arithmetic; inv_b0 = 1/b0_lin is constant along a trajectory.
inline void alpha_update(SystemState& state, cplx inv_b0,
                         const DyneRecord& record, cplx ei_phi, double dW,
                         std::uint64_t step) {
  const cplx inv_d = 1.0 / (inv_b0 - std::conj(record.B));  // = B_v^S/(1-v)
  const cplx bs = (1.0 - record.v) * inv_d;
  const double m = std::norm(bs);
  if (m >= 1.0 - 1e-12) throw StateBlowupError(step);
  state.alpha_v +=
      inv_d * (std::conj(bs) * ei_phi + std::conj(ei_phi)) / (1.0 - m) * dW;
}

// The interval loop, monomorphized per policy so the feedback evaluation
// inlines instead of going through the variant dispatch every interval.
template <typename Policy>
void integrate(const Policy& policy, SystemState& state, cplx inv_b0,
               bool coherent, DyneRecord& record, std::uint64_t n_intervals,
               int substeps, double dv, double sqrt_dv, NoiseStream& rng,
               const TraceSink* trace) {
  std::uint64_t step = 0;
  for (std::uint64_t k = 0; k < n_intervals; ++k) {
    const cplx e1 = detail::policy_phasor(policy, record, record.v);
    const cplx e1c = std::conj(e1);
    const cplx e2 = e1 * e1;
    if (trace && *trace)
      (*trace)(record.v, std::atan2(e1.imag(), e1.real()), std::abs(record.A),
               std::abs(record.B),
               record.C() == cplx(0.0, 0.0) ? 0.0 : std::arg(record.C()));
    for (int s = 0; s < substeps; ++s, ++step) {
      const double dW = rng.next_normal() * sqrt_dv;
      const double signal_dv = 2.0 * (state.alpha_v * e1c).real() * dv + dW;
      if (!coherent) alpha_update(state, inv_b0, record, e1, dW, step);
      record.A += e1 * signal_dv;
      record.B -= e2 * dv;
      record.v += dv;
      state.v = record.v;
    }
  }
}

}  // namespace

cplx closed_form_Bs(cplx b0_lin, cplx B_v, double v) {
  if (b0_lin == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
  return (1.0 - v) / (1.0 / b0_lin - std::conj(B_v));
}

void step_alpha(SystemState& state, const DyneRecord& record, double Phi,
                double dW, double dv) {
  (void)dv;  // the α equation has no drift term
  if (state.b0_lin == cplx(0.0, 0.0)) return;  // coherent states stay coherent
  alpha_update(state, 1.0 / state.b0_lin, record, std::polar(1.0, Phi), dW, 0);
  state.v = record.v + dv;
}

double final_estimate(const DyneRecord& record) {
  const cplx C = record.C();
  if (C == cplx(0.0, 0.0))
    throw std::domain_error("final_estimate: C = 0, estimate undefined");
  return std::arg(C);
}

TrajectoryOutcome run_trajectory(const SqueezedState& initial,
                                 double true_phase,
                                 const FeedbackPolicy& policy,
                                 const TimeGrid& grid, NoiseStream& rng,
                                 const TraceSink* trace) {
  if (!(grid.dv_feedback > 0.0) || !(grid.dv_feedback <= 1.0))
    throw std::invalid_argument("run_trajectory: dv_feedback must be in (0, 1]");
  if (grid.substeps < 1)
    throw std::invalid_argument("run_trajectory: substeps must be >= 1");
  if (!(grid.v_end > 0.0) || !(grid.v_end <= 1.0))
    throw std::invalid_argument("run_trajectory: v_end must be in (0, 1]");

  // Snap the grid so an integer number of intervals tiles [0, v_end].
  const auto n_intervals = static_cast<std::uint64_t>(
      std::ceil(grid.v_end / grid.dv_feedback - 1e-9));
  const double dv_fb = grid.v_end / static_cast<double>(n_intervals);
  const double dv = dv_fb / grid.substeps;
  const double sqrt_dv = std::sqrt(dv);

  // The feedback acts on the state as prepared; only the estimate is
  // referenced to the true phase, so the rotation is applied up front.
  const cplx rot = std::polar(1.0, true_phase);
  const SqueezedState prepared{initial.alpha * rot, initial.xi * rot * rot};
  const LinearFormParams lf = to_linear_form(prepared);

  SystemState state{prepared.alpha, lf.b_lin, 0.0};
  const bool coherent = (state.b0_lin == cplx(0.0, 0.0));
  const cplx inv_b0 = coherent ? cplx(0.0, 0.0) : 1.0 / state.b0_lin;

  DyneRecord record;
  std::visit(
      [&](const auto& pol) {
        integrate(pol, state, inv_b0, coherent, record, n_intervals,
                  grid.substeps, dv, sqrt_dv, rng, trace);
      },
      policy);

  TrajectoryOutcome out;
  out.final_record = record;
  out.true_phase = true_phase;
  const cplx C = record.C();
  if (C == cplx(0.0, 0.0)) {
    out.failed = true;
    return out;
  }
  out.theta_hat = std::arg(C);
  out.wrapped_error = wrap_angle(out.theta_hat - true_phase);
  try {
    out.zeta_diag = zeta_from_record(record.A, record.B);
    out.zeta_valid = true;
  } catch (const std::domain_error&) {
    out.zeta_valid = false;
  }
  return out;
}

}  // namespace dyne
