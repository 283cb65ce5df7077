#include "core/squeezed.hpp"

#include <cmath>
#include <stdexcept>

namespace dyne {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
// |b_lin| above this is treated as infinite squeezing and rejected.
constexpr double kMaxB = 1.0 - 1e-12;
}  // namespace

double mean_photon(const SqueezedState& s) {
  const double sh = std::sinh(std::abs(s.xi));
  return std::norm(s.alpha) + sh * sh;
}

double optimal_n0(double nbar) {
  if (!(nbar > 0.0)) throw std::domain_error("optimal_n0: nbar must be > 0");
  return std::log(4.0 * nbar) - 0.25 * std::log(kTwoPi);
}

double intrinsic_phase_variance(double nbar, double n0) {
  if (!(nbar > 0.0) || !(n0 > 0.0))
    throw std::domain_error("intrinsic_phase_variance: nbar and n0 must be > 0");
  return (n0 + 1.0) / (4.0 * nbar * nbar) + 2.0 * std::erfc(std::sqrt(2.0 * n0));
}

double theoretical_limit(double nbar) {
  if (!(nbar > 0.0)) throw std::domain_error("theoretical_limit: nbar must be > 0");
  return (std::log(nbar) + kLimitDelta) / (4.0 * nbar * nbar);
}

double markII_introduced(double nbar) {
  if (!(nbar > 0.0)) throw std::domain_error("markII_introduced: nbar must be > 0");
  return 0.125 / (nbar * std::sqrt(nbar));
}

double heterodyne_introduced(double nbar) {
  if (!(nbar > 0.0)) throw std::domain_error("heterodyne_introduced: nbar must be > 0");
  return 0.25 / nbar;
}

double efficiency_floor(double eta, double nbar) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("efficiency_floor: eta must be in (0, 1]");
  if (!(nbar > 0.0)) throw std::domain_error("efficiency_floor: nbar must be > 0");
  return (1.0 - eta) / (4.0 * eta * nbar);
}

double crossover_nbar(double eta, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::domain_error("crossover_nbar: need 0 < lo < hi");
  auto f = [eta](double n) {
    return markII_introduced(n) - efficiency_floor(eta, n);
  };
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::domain_error("crossover_nbar: no sign change in [lo, hi]");
  for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SqueezedState make_optimal_squeezed(double nbar) {
  // n0 depends only on the total n̄, which is held fixed, so the
  // self-consistency (n0 from n̄, alpha^2 from zeta) closes in one step.
  const double n0 = optimal_n0(nbar);
  if (!(n0 > 0.0))
    throw std::domain_error("make_optimal_squeezed: nbar too small (optimal n0 <= 0)");
  const double zeta = 0.5 * std::log(n0 / nbar);  // real, negative
  const double sh = std::sinh(zeta);
  const double a2 = nbar - sh * sh;
  if (!(a2 > 0.0))
    throw std::domain_error("make_optimal_squeezed: infeasible nbar (sinh^2 zeta >= nbar)");
  return SqueezedState{cplx(std::sqrt(a2), 0.0), cplx(zeta, 0.0)};
}

LinearFormParams to_linear_form(const SqueezedState& s) {
  const double xmag = std::abs(s.xi);
  if (xmag == 0.0) return LinearFormParams{s.alpha, cplx(0.0, 0.0)};
  const cplx b = -(s.xi / xmag) * std::tanh(xmag);
  return LinearFormParams{s.alpha - b * std::conj(s.alpha), b};
}

SqueezedState from_linear_form(const LinearFormParams& p) {
  const double bmag = std::abs(p.b_lin);
  if (bmag > kMaxB)
    throw std::domain_error("from_linear_form: |b_lin| too close to 1 (infinite squeezing)");
  if (bmag == 0.0) return SqueezedState{p.a_lin, cplx(0.0, 0.0)};
  const cplx alpha = (p.a_lin + p.b_lin * std::conj(p.a_lin)) / (1.0 - bmag * bmag);
  const cplx xi = -(p.b_lin / bmag) * std::atanh(bmag);
  return SqueezedState{alpha, xi};
}

ZetaDecomposition zeta_from_record(cplx A, cplx B) {
  const SqueezedState s = from_linear_form(LinearFormParams{A, B});
  if (s.alpha == cplx(0.0, 0.0))
    throw std::domain_error("zeta_from_record: alpha = 0, phase undefined");
  ZetaDecomposition z;
  z.zeta = s.xi * std::conj(s.alpha) / s.alpha;
  z.nbar_est = mean_photon(s);
  z.n0 = z.nbar_est * std::exp(2.0 * z.zeta.real());
  return z;
}

}  // namespace dyne
