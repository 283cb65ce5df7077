#include "core/reproduce.hpp"

#include <cmath>
#include <cstdio>

namespace dyne {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

ReproduceReport reproduce_crossover(const Preset& preset) {
  ReproduceReport rep;
  const double n = crossover_nbar(preset.eta);
  rep.passed = n >= preset.bound_lo && n <= preset.bound_hi;
  rep.text = preset.name + ": crossover nbar = " + fmt(n) + " (required [" +
             fmt(preset.bound_lo) + ", " + fmt(preset.bound_hi) + "]) -> " +
             (rep.passed ? "pass" : "FAIL") + "\n";
  return rep;
}

ReproduceReport reproduce_holevo(const Preset& preset, unsigned workers) {
  ReproduceReport rep;
  const auto outcomes = run_ensemble(ensemble_spec(preset.config), workers);
  rep.run.config = preset.config;
  rep.run.stats = summarize(outcomes);
  const double measured = rep.run.stats.holevo_variance;
  const double lo = preset.expected * (1.0 - preset.rel_tol);
  const double hi = preset.expected * (1.0 + preset.rel_tol);
  rep.passed = measured >= lo && measured <= hi;
  rep.text = preset.name + ": holevo variance = " + fmt(measured) +
             " (stderr " + fmt(rep.run.stats.stderr_holevo) + ", wrapped " +
             fmt(rep.run.stats.wrapped_variance) + "), pinned " +
             fmt(preset.expected) + " +-" + fmt(100.0 * preset.rel_tol) +
             "% -> " + (rep.passed ? "pass" : "FAIL") + "\n";
  return rep;
}

ReproduceReport reproduce_excess(const Preset& preset, unsigned workers) {
  ReproduceReport rep;
  const auto outcomes = run_ensemble(ensemble_spec(preset.config), workers);
  rep.run.config = preset.config;
  rep.run.stats = summarize(outcomes);
  const ZetaScatter scatter = zeta_scatter(outcomes);
  const ZetaExcess excess = zeta_excess_ratios(scatter, preset.config.nbar);
  rep.run.have_zeta = true;
  rep.run.excess_mod_ratio = excess.from_modulus_ratio;
  rep.run.excess_phase_ratio = excess.from_phase_ratio;
  rep.passed = rep.run.excess_mod_ratio < preset.ratio_bound &&
               rep.run.excess_phase_ratio < preset.ratio_bound;
  rep.text = preset.name + ": excess ratios modulus = " +
             fmt(rep.run.excess_mod_ratio) + ", phase = " +
             fmt(rep.run.excess_phase_ratio) + " (both must be < " +
             fmt(preset.ratio_bound) + ") -> " +
             (rep.passed ? "pass" : "FAIL") + "\n";
  return rep;
}

}  // namespace

ReproduceReport run_reproduce(const Preset& preset, unsigned workers) {
  switch (preset.metric) {
    case PresetMetric::kCrossover:
      return reproduce_crossover(preset);
    case PresetMetric::kHolevoVariance:
      return reproduce_holevo(preset, workers);
    case PresetMetric::kExcessRatios:
      return reproduce_excess(preset, workers);
  }
  throw std::logic_error("run_reproduce: unknown metric");
}

}  // namespace dyne
