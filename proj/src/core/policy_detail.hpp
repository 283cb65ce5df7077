#pragma once

// Per-policy feedback evaluation, shared between the public dispatchers
// in policy.cpp and the monomorphized trajectory loop in sde.cpp (which
// hoists the variant dispatch out of its inner loop).

#include <cmath>
#include <limits>
#include <optional>

#include "core/policy.hpp"
#include "core/record.hpp"
#include "core/squeezed.hpp"

namespace dyne::detail {

inline constexpr double kPi = 3.141592653589793238462643383280;
inline constexpr double kHalfPi = 1.570796326794896619231321691640;

inline double arg_or_zero(const cplx& z) {
  return (z == cplx(0.0, 0.0)) ? 0.0 : std::arg(z);
}

// Record-derived quantities every estimate-based policy needs; computed
// once per feedback evaluation.
struct RecordView {
  cplx C;
  double abs_B;
  double abs_C;
  double inv_abs_C;
  bool c_degenerate;

  explicit RecordView(const DyneRecord& r)
      : C(r.C()), abs_B(abs_o1(r.B)), abs_C(abs_o1(C)) {
    // Roundoff floor of C = A v + B A*. Both terms have magnitude of order
    // (v + |B|)|A|; a |C| many orders below that is cancellation noise,
    // not signal. Under a constant feedback phase C vanishes identically
    // (A = e^{iΦ}S with S real gives A v + B A* = v e^{iΦ}(S - S*) = 0),
    // so before the feedback has ever moved, roundoff is all there is.
    const double scale =
        (r.v + abs_B) * std::sqrt(std::max(std::norm(r.A), 1.0));
    c_degenerate =
        abs_C <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
    inv_abs_C = c_degenerate ? 0.0 : 1.0 / abs_C;
  }
};

inline double interp_impl(const DyneRecord& r, const RecordView& view,
                          double epsilon) {
  if (view.c_degenerate) return arg_or_zero(r.A);
  const double arg_c = std::arg(view.C);
  const double arg_a = arg_or_zero(r.A);
  // Exact endpoints keep ε = 1 bit-identical to mark II (and ε = 0 to the
  // best estimate); the interpolated form only matches them to roundoff.
  if (epsilon == 0.0) return arg_c;
  if (epsilon == 1.0) return arg_a;
  return arg_c + epsilon * wrap_angle(arg_a - arg_c);
}

inline double schedule_impl(const RecordView& view, double v, double divisor) {
  if (view.c_degenerate) return 1.0;
  const double gap = std::max(v * v - view.abs_B * view.abs_B, 0.0);
  return gap * view.inv_abs_C * std::sqrt(v / (1.0 - v)) / divisor;
}

inline double time_epsilon_estimate(const DyneRecord& r,
                                    const RecordView& view, double v,
                                    double divisor) {
  if (v <= 0.0 || view.c_degenerate) return arg_or_zero(r.A);
  return interp_impl(r, view, schedule_impl(view, v, divisor));
}

inline ZetaDecomposition zeta_impl(const DyneRecord& r, const RecordView& view,
                                   double v) {
  ZetaDecomposition z;
  const cplx alpha_v = view.C / (v * v - view.abs_B * view.abs_B);
  z.nbar_est = std::norm(alpha_v);
  if (view.abs_B == 0.0) {
    z.zeta = cplx(0.0, 0.0);
    z.n0 = z.nbar_est;
    return z;
  }
  const cplx phase_ref = std::polar(1.0, -2.0 * std::arg(view.C));
  z.zeta = -(r.B * phase_ref / view.abs_B) * std::atanh(view.abs_B / v);
  z.n0 = z.nbar_est * std::exp(2.0 * z.zeta.real());
  return z;
}

// The corrected policy's B-steering branch; empty when it does not fire
// and the TimeEpsilon estimate stands.
inline std::optional<double> corrected_override(const DyneRecord& r,
                                                const RecordView& view,
                                                double v, double lambda,
                                                double onset_v) {
  if (v < onset_v || view.c_degenerate) return std::nullopt;
  if (!(view.abs_B > 0.0) || !(view.abs_B < v)) return std::nullopt;

  const ZetaDecomposition est = zeta_impl(r, view, v);
  // Below this n̄ there is no positive optimal n0, hence no target ζ.
  if (!(est.nbar_est > 0.0) || !(optimal_n0(est.nbar_est) > 0.0)) {
    return std::nullopt;
  }
  const double zopt_mag =
      std::abs(0.5 * std::log(optimal_n0(est.nbar_est) / est.nbar_est));
  const double threshold =
      zopt_mag * std::exp(lambda * est.nbar_est * (1.0 - v));
  if (!(abs_o1(est.zeta) > threshold)) return std::nullopt;

  const cplx b_opt = v * (view.C / std::conj(view.C)) * std::tanh(zopt_mag);
  const cplx d = r.B - b_opt;
  if (d == cplx(0.0, 0.0)) return std::nullopt;  // already at the optimum
  return 0.5 * std::arg(d);
}

inline double corrected_impl(const DyneRecord& r, const RecordView& view,
                             double v, double lambda, double divisor,
                             double onset_v) {
  const auto steer = corrected_override(r, view, v, lambda, onset_v);
  if (steer) return *steer;
  return time_epsilon_estimate(r, view, v, divisor) + kHalfPi;
}

inline cplx times_i(const cplx& z) { return cplx(-z.imag(), z.real()); }

// i·A/|A| — the mark I/II phasor (Φ = arg A + π/2); i when A = 0.
inline cplx mark_phasor(const cplx& A) {
  if (A == cplx(0.0, 0.0)) return cplx(0.0, 1.0);
  return times_i(A * (1.0 / abs_o1(A)));
}

// e^{i(φ̂ + π/2)} for the interpolated estimate φ̂ between arg C (ε = 0)
// and arg A (ε = 1): i·(C/|C|)·e^{iε δ} with δ = arg(A C*), which needs
// one atan2 and one sincos instead of two atan2 plus one sincos.
inline cplx interp_phasor(const DyneRecord& r, const RecordView& view,
                          double epsilon) {
  if (view.c_degenerate) return mark_phasor(r.A);
  if (epsilon == 0.0) return times_i(view.C * view.inv_abs_C);
  if (epsilon == 1.0) return mark_phasor(r.A);
  const double delta = std::arg(r.A * std::conj(view.C));
  const double ed = epsilon * delta;
  const cplx rot(std::cos(ed), std::sin(ed));
  return times_i(view.C * view.inv_abs_C) * rot;
}

inline cplx time_epsilon_phasor(const DyneRecord& r, const RecordView& view,
                                double v, double divisor) {
  if (v <= 0.0 || view.c_degenerate) return mark_phasor(r.A);
  return interp_phasor(r, view, schedule_impl(view, v, divisor));
}

// Concrete-policy phasor overloads; the hot loop calls these directly.
inline cplx policy_phasor(const Heterodyne& p, const DyneRecord&, double v) {
  return std::polar(1.0, heterodyne_phase(v, p.detuning));
}
inline cplx policy_phasor(const MarkI&, const DyneRecord& r, double) {
  return mark_phasor(r.A);
}
inline cplx policy_phasor(const MarkII&, const DyneRecord& r, double) {
  return mark_phasor(r.A);
}
inline cplx policy_phasor(const ConstantEpsilon& p, const DyneRecord& r,
                          double) {
  return interp_phasor(r, RecordView(r), p.epsilon);
}
inline cplx policy_phasor(const TimeEpsilon& p, const DyneRecord& r,
                          double v) {
  const RecordView view(r);
  return time_epsilon_phasor(r, view, v, p.divisor);
}
inline cplx policy_phasor(const Corrected& p, const DyneRecord& r, double v) {
  const RecordView view(r);
  const auto steer = corrected_override(r, view, v, p.lambda, p.onset_v);
  if (steer) return std::polar(1.0, *steer);
  return time_epsilon_phasor(r, view, v, p.divisor);
}

}  // namespace dyne::detail
