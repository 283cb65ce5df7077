#pragma once

#include <complex>

#include "core/squeezed.hpp"

namespace dyne {

// Measurement record: the two running integrals that are sufficient
// statistics of the photocurrent, A_v = ∫ e^{iΦ} I du and
// B_v = -∫ e^{2iΦ} du, plus the scaled time v ∈ [0, 1].
// |B_v| <= v always (unit-modulus integrand).
struct DyneRecord {
  cplx A{0.0, 0.0};
  cplx B{0.0, 0.0};
  double v = 0.0;

  // Derived combination C_v = A_v v + B_v A_v*; its argument is the best
  // running phase estimate and, at v = 1, the final estimate.
  cplx C() const { return A * v + B * std::conj(A); }
};

// Homodyne signal increment I(v)dv = 2 Re(alpha_v e^{-iΦ}) dv + dW.
// The same dW must drive the conditioned-state update for this step.
inline double signal_increment(cplx alpha_v, double Phi, double dW, double dv) {
  const cplx e = std::polar(1.0, Phi);
  return 2.0 * (alpha_v * std::conj(e)).real() * dv + dW;
}

// Euler accumulation of both record integrals over one substep:
// dA = e^{iΦ} (I dv), dB = -e^{2iΦ} dv; v advances by dv.
inline void update_record(DyneRecord& r, double signal_dv, double Phi, double dv) {
  const cplx e = std::polar(1.0, Phi);
  r.A += e * signal_dv;
  r.B -= e * e * dv;
  r.v += dv;
}

}  // namespace dyne
