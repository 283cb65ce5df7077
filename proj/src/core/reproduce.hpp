#pragma once

#include <string>

#include "core/config.hpp"
#include "core/report.hpp"

namespace dyne {

// Result of one canned reproduction run: a human-readable report plus the
// pass/fail verdict against the preset's pinned expectation.
struct ReproduceReport {
  bool passed = false;
  std::string text;
  RunResult run;  // populated for ensemble-backed presets
};

ReproduceReport run_reproduce(const Preset& preset, unsigned workers);

}  // namespace dyne
