#include "core/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "core/policy_detail.hpp"

namespace dyne {

using detail::kHalfPi;
using detail::kPi;
using detail::RecordView;

double wrap_angle(double theta) {
  // Fast path for |theta| < 3π (covers sums/differences of principal
  // angles): one add/subtract of 2π, which is exact there by Sterbenz's
  // lemma and therefore bit-identical to the remainder-based fallback.
  constexpr double kTwoPi = 2.0 * kPi;
  if (theta > kPi) {
    if (theta <= 3.0 * kPi) return theta - kTwoPi;
  } else if (theta <= -kPi) {
    if (theta > -3.0 * kPi) return theta + kTwoPi;  // -π lands on +π
  } else {
    return theta;
  }
  double w = std::remainder(theta, kTwoPi);
  if (w <= -kPi) w = kPi;
  return w;
}

bool record_c_degenerate(const DyneRecord& r) {
  return RecordView(r).c_degenerate;
}

double interp_estimate(const DyneRecord& r, double epsilon) {
  return detail::interp_impl(r, RecordView(r), epsilon);
}

double epsilon_schedule(const DyneRecord& r, double v, double divisor) {
  if (!(v > 0.0) || !(v < 1.0))
    throw std::domain_error("epsilon_schedule: v must be in (0, 1)");
  return detail::schedule_impl(RecordView(r), v, divisor);
}

ZetaDecomposition zeta_estimate_at(const DyneRecord& r, double v) {
  if (!(v > 0.0)) throw std::domain_error("zeta_estimate_at: v must be > 0");
  const RecordView view(r);
  if (!(view.abs_B < v))
    throw std::domain_error("zeta_estimate_at: |B| must be < v");
  if (view.c_degenerate)
    throw std::domain_error("zeta_estimate_at: record C is degenerate");
  return detail::zeta_impl(r, view, v);
}

double heterodyne_phase(double v, double detuning) {
  if (!(v >= 0.0) || !(v < 1.0))
    throw std::domain_error("heterodyne_phase: v must be in [0, 1)");
  return -detuning * std::log1p(-v);
}

double corrected_phase(const DyneRecord& r, double v, double lambda,
                       double divisor, double onset_v) {
  return detail::corrected_impl(r, RecordView(r), v, lambda, divisor, onset_v);
}

double feedback_phase(const FeedbackPolicy& p, const DyneRecord& r, double v) {
  const double phi = std::visit(
      [&](const auto& pol) -> double {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, Heterodyne>) {
          return heterodyne_phase(v, pol.detuning);
        } else if constexpr (std::is_same_v<T, MarkI> ||
                             std::is_same_v<T, MarkII>) {
          return detail::arg_or_zero(r.A) + kHalfPi;
        } else if constexpr (std::is_same_v<T, ConstantEpsilon>) {
          return interp_estimate(r, pol.epsilon) + kHalfPi;
        } else if constexpr (std::is_same_v<T, TimeEpsilon>) {
          const RecordView view(r);
          return detail::time_epsilon_estimate(r, view, v, pol.divisor) +
                 kHalfPi;
        } else {
          return detail::corrected_impl(r, RecordView(r), v, pol.lambda,
                                        pol.divisor, pol.onset_v);
        }
      },
      p);
  return wrap_angle(phi);
}

cplx feedback_phasor(const FeedbackPolicy& p, const DyneRecord& r, double v) {
  return std::visit(
      [&](const auto& pol) { return detail::policy_phasor(pol, r, v); }, p);
}

}  // namespace dyne
