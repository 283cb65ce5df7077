#include "core/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/policy.hpp"
#include "core/squeezed.hpp"

namespace dyne {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// A mean resultant below the roundoff floor of the phasor sums (each term
// contributes ~eps of error) is numerically zero: the variance diverges.
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kResultantFloor = (64.0 * kEps) * (64.0 * kEps);

double holevo_from_resultant(double sum_cos, double sum_sin, double n) {
  const double r2 = (sum_cos * sum_cos + sum_sin * sum_sin) / (n * n);
  if (r2 <= kResultantFloor) return kInf;
  // Clamp the -O(eps) a lone sample can produce (cos^2 + sin^2 rounds to
  // just above 1).
  return std::max(0.0, 1.0 / r2 - 1.0);
}
}  // namespace

double wrap_error(double theta_hat, double true_phase) {
  return wrap_angle(theta_hat - true_phase);
}

double holevo_variance(const std::vector<double>& errors) {
  if (errors.empty()) throw std::domain_error("holevo_variance: empty sample");
  double sc = 0.0;
  double ss = 0.0;
  for (double e : errors) {
    sc += std::cos(e);
    ss += std::sin(e);
  }
  return holevo_from_resultant(sc, ss, static_cast<double>(errors.size()));
}

double wrapped_variance(const std::vector<double>& errors) {
  if (errors.empty()) throw std::domain_error("wrapped_variance: empty sample");
  double s = 0.0;
  for (double e : errors) s += e * e;
  return s / static_cast<double>(errors.size());
}

double holevo_stderr_jackknife(const std::vector<double>& errors) {
  const std::size_t n = errors.size();
  if (n < 2) return 0.0;
  const std::size_t nb =
      std::min<std::size_t>(static_cast<std::size_t>(kJackknifeBatches), n);

  double total_c = 0.0;
  double total_s = 0.0;
  std::vector<double> batch_c(nb, 0.0), batch_s(nb, 0.0);
  std::vector<std::size_t> batch_n(nb, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i * nb / n;  // contiguous, near-equal batches
    const double c = std::cos(errors[i]);
    const double s = std::sin(errors[i]);
    total_c += c;
    total_s += s;
    batch_c[b] += c;
    batch_s[b] += s;
    batch_n[b] += 1;
  }

  std::vector<double> leave_out(nb);
  double mean = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double m = static_cast<double>(n - batch_n[b]);
    leave_out[b] =
        holevo_from_resultant(total_c - batch_c[b], total_s - batch_s[b], m);
    mean += leave_out[b];
  }
  mean /= static_cast<double>(nb);
  if (!std::isfinite(mean)) return kInf;

  double ss = 0.0;
  for (double v : leave_out) ss += (v - mean) * (v - mean);
  const double nbd = static_cast<double>(nb);
  return std::sqrt((nbd - 1.0) / nbd * ss);
}

EnsembleStats summarize(const std::vector<TrajectoryOutcome>& outcomes) {
  EnsembleStats st;
  std::vector<double> errors;
  errors.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++st.failed_count;
      continue;
    }
    errors.push_back(o.wrapped_error);
  }
  st.n_samples = errors.size();
  if (errors.empty()) return st;

  st.holevo_variance = holevo_variance(errors);
  st.wrapped_variance = wrapped_variance(errors);
  double m = 0.0;
  for (double e : errors) m += e;
  st.mean_error = m / static_cast<double>(errors.size());
  st.stderr_holevo = holevo_stderr_jackknife(errors);
  return st;
}

double excess_from_modulus(double rms_dzeta, double n0) {
  if (n0 < 0.0) throw std::domain_error("excess_from_modulus: n0 < 0");
  return rms_dzeta * rms_dzeta * (1.0 + 4.0 * n0);
}

double excess_from_phase(double rms_arg_zeta, double n0) {
  if (n0 <= 0.0) throw std::domain_error("excess_from_phase: n0 <= 0");
  return rms_arg_zeta * rms_arg_zeta / (16.0 * n0);
}

FitResult power_law_fit(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw std::domain_error("power_law_fit: need at least 3 points");

  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i].first <= 0.0 || points[i].second <= 0.0) {
      throw std::domain_error("power_law_fit: nonpositive point");
    }
    xs[i] = std::log(points[i].first);
    ys[i] = std::log(points[i].second);
    sx += xs[i];
    sy += ys[i];
  }
  const double nd = static_cast<double>(n);
  const double mx = sx / nd;
  const double my = sy / nd;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::domain_error("power_law_fit: degenerate abscissae");

  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ssr += r * r;
  }

  FitResult fit;
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.exponent_stderr = std::sqrt(ssr / (nd - 2.0) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

ZetaExcess zeta_excess_ratios(const ZetaScatter& scatter, double nbar) {
  const double n0 = optimal_n0(nbar);
  if (!(n0 > 0.0))
    throw std::domain_error("zeta_excess_ratios: optimal n0 <= 0");
  const double min_var = n0 / (4.0 * nbar * nbar);
  ZetaExcess ex;
  ex.from_modulus_ratio = excess_from_modulus(scatter.rms_dev_modulus, n0);
  ex.from_phase_ratio = excess_from_phase(scatter.rms_dev_phase, n0) / min_var;
  return ex;
}

ZetaScatter zeta_scatter(const std::vector<TrajectoryOutcome>& outcomes) {
  ZetaScatter sc;
  double ss_mod = 0.0;
  double ss_arg = 0.0;
  std::uint64_t below = 0;
  for (const auto& o : outcomes) {
    if (o.failed || !o.zeta_valid) {
      ++sc.skipped_count;
      continue;
    }
    const double nbar_est = o.zeta_diag.nbar_est;
    if (!(nbar_est > 0.0)) {
      ++sc.skipped_count;
      continue;
    }
    const double n0_opt = optimal_n0(nbar_est);
    if (!(n0_opt > 0.0)) {
      ++sc.skipped_count;
      continue;
    }
    const cplx zeta = o.zeta_diag.zeta;
    ZetaScatterPoint p;
    p.nbar_est = nbar_est;
    p.zeta_real = zeta.real();
    p.zeta_arg = std::arg(-zeta);
    sc.points.push_back(p);

    const double zeta_opt = 0.5 * std::log(n0_opt / nbar_est);  // negative
    const double dmod = std::abs(zeta) - std::abs(zeta_opt);
    ss_mod += dmod * dmod;
    ss_arg += p.zeta_arg * p.zeta_arg;
    if (p.zeta_real < zeta_opt) ++below;
  }
  if (!sc.points.empty()) {
    const double m = static_cast<double>(sc.points.size());
    sc.rms_dev_modulus = std::sqrt(ss_mod / m);
    sc.rms_dev_phase = std::sqrt(ss_arg / m);
    sc.fraction_below_optimum = static_cast<double>(below) / m;
  }
  return sc;
}

}  // namespace dyne
