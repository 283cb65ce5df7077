#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/ensemble.hpp"

namespace dyne {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class StateKind { kCoherent, kOptimalSqueezed, kCustom };

// One simulation experiment, as read from a config file or CLI flags.
struct SimConfig {
  double nbar = 100.0;
  StateKind state_kind = StateKind::kOptimalSqueezed;
  cplx custom_alpha{0.0, 0.0};  // used only for StateKind::kCustom
  cplx custom_xi{0.0, 0.0};
  FeedbackPolicy policy = MarkII{};
  double dv_feedback = 1e-3;  // ignored when paper_rule is set
  bool paper_rule = false;    // Δv = n̄·V_th(n̄)/25
  int substeps = 1;
  std::uint64_t n_trajectories = 1000;
  std::uint64_t master_seed = 1;
  bool random_true_phase = false;
  std::string out_dir;
};

// Effective feedback interval: the paper rule or the explicit value.
double resolved_dv(const SimConfig& config);

// Input state implied by (nbar, state_kind).
SqueezedState make_initial_state(const SimConfig& config);

// Translation into the engine's ensemble description.
EnsembleSpec ensemble_spec(const SimConfig& config);

// JSON round trip (schema_version pinned; unknown versions rejected).
std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(const std::string& text);

// FNV-1a 64 over the canonical JSON form; stable provenance tag.
std::uint64_t config_hash(const SimConfig& config);

// Policy <-> text. parse_policy accepts NAME[:params] where params are
// comma-separated key=value pairs, or a single bare value for the policy's
// primary parameter (heterodyne:450, ceps:0.5, teps:1.1, corrected:5e-4).
FeedbackPolicy parse_policy(const std::string& text);
std::string policy_name(const FeedbackPolicy& policy);
std::string policy_params(const FeedbackPolicy& policy);

// Canned reproduction experiments pinned to published numbers.
enum class PresetMetric { kHolevoVariance, kCrossover, kExcessRatios };

struct Preset {
  std::string name;
  std::string description;
  SimConfig config;       // unused for kCrossover
  PresetMetric metric = PresetMetric::kHolevoVariance;
  double expected = 0.0;  // pinned variance for kHolevoVariance
  double rel_tol = 0.0;   // ± fraction about `expected`
  double bound_lo = 0.0;  // kCrossover acceptance bracket
  double bound_hi = 0.0;
  double eta = 0.0;       // kCrossover detector efficiency
  double ratio_bound = 0.0;  // kExcessRatios: both ratios must stay below
};

std::optional<Preset> find_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace dyne
