#pragma once

#include <complex>

namespace dyne {

using cplx = std::complex<double>;

// |z| via sqrt(|z|^2), skipping hypot's over/underflow rescaling. Only
// for quantities of order one (record sums, unit phasors), where the
// square can neither overflow nor lose the result to underflow.
inline double abs_o1(const cplx& z) { return std::sqrt(std::norm(z)); }

// Additive constant in the asymptotic minimum introduced variance
// (ln nbar + kLimitDelta)/(4 nbar^2). Known only to this precision.
inline constexpr double kLimitDelta = 2.43;

// Physical squeezed state |alpha, xi>: coherent amplitude and squeeze
// parameter. A coherent state is the xi = 0 case.
struct SqueezedState {
  cplx alpha{0.0, 0.0};
  cplx xi{0.0, 0.0};
};

// Linear-eigenvalue representation of a squeezed state: the state
// annihilated by (a - b_lin a† - a_lin). This is the form the
// measurement SDEs evolve; |b_lin| < 1 strictly (|b_lin| → 1 is
// infinite squeezing).
struct LinearFormParams {
  cplx a_lin{0.0, 0.0};
  cplx b_lin{0.0, 0.0};
};

// Squeezing referenced to the amplitude direction: zeta = xi alpha*/alpha,
// n0 = nbar e^{2 Re zeta}. n0 sets the phase-quadrature noise and with it
// the intrinsic phase variance.
struct ZetaDecomposition {
  double nbar_est = 0.0;
  cplx zeta{0.0, 0.0};
  double n0 = 0.0;
};

// n̄ = |alpha|^2 + sinh^2|xi|.
double mean_photon(const SqueezedState& s);

// Asymptotic optimum of the phase-quadrature photon number:
// n0 = ln(4 n̄) - (1/4) ln(2π). Requires nbar > 0 (and is meaningful
// only where the result is positive, n̄ ≳ 0.4).
double optimal_n0(double nbar);

// Intrinsic phase variance of a squeezed state with given (n̄, n0):
// (n0 + 1)/(4 n̄^2) + 2 erfc(sqrt(2 n0)).
double intrinsic_phase_variance(double nbar, double n0);

// Minimum introduced phase variance (ln n̄ + 2.43)/(4 n̄^2).
double theoretical_limit(double nbar);

// Introduced-variance baselines: (1/8) n̄^{-3/2} and (1/4) n̄^{-1}.
double markII_introduced(double nbar);
double heterodyne_introduced(double nbar);

// Inefficient-detection floor (1 - eta)/(4 eta n̄); zero for eta = 1.
double efficiency_floor(double eta, double nbar);

// Photon number at which the mark II introduced variance crosses the
// efficiency floor for detector efficiency eta: bisection root of
// markII_introduced(n) - efficiency_floor(eta, n) in [lo, hi]. Throws
// std::domain_error when the bracket does not straddle a sign change.
double crossover_nbar(double eta, double lo = 10.0, double hi = 1e6);

// Squeezed state of mean photon number nbar minimizing the intrinsic
// phase variance: zeta real negative with n̄ e^{2 zeta} = optimal_n0(n̄),
// alpha real positive. Throws std::domain_error if nbar is too small for
// the construction to be feasible.
SqueezedState make_optimal_squeezed(double nbar);

// (alpha, xi) -> (A^S, B^S): B^S = -(xi/|xi|) tanh|xi|, A^S = alpha - B^S alpha*.
LinearFormParams to_linear_form(const SqueezedState& s);

// Inverse mapping: alpha = (A + B A*)/(1 - |B|^2), xi = -(B/|B|) atanh|B|.
// Rejects |b_lin| > 1 - 1e-12 so infinite-squeezing pathologies are loud.
SqueezedState from_linear_form(const LinearFormParams& p);

// The POM-induced decomposition of a record pair (A, B): maps via
// from_linear_form and reports (n̄, zeta = xi alpha*/alpha, n0).
// Throws std::domain_error for |B| >= 1 and for alpha = 0 (undefined phase).
ZetaDecomposition zeta_from_record(cplx A, cplx B);

}  // namespace dyne
