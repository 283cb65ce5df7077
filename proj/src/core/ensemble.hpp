#pragma once

#include <cstdint>
#include <vector>

#include "core/sde.hpp"

namespace dyne {

// One ensemble = N independent trajectories of the same experiment.
// Noise is keyed by (master_seed, trajectory index), so results are a pure
// function of this spec regardless of how many workers execute it.
struct EnsembleSpec {
  SqueezedState initial;
  FeedbackPolicy policy;
  TimeGrid grid;
  std::uint64_t n_trajectories = 1;
  std::uint64_t master_seed = 1;
  bool random_true_phase = false;  // uniform per-trajectory when set
};

// Runs the ensemble on `workers` threads (1 = inline). Outcomes are
// deposited by trajectory index; trajectories that fail (state blowup or
// undefined final estimate) come back with `failed` set rather than
// aborting the ensemble. An optional trace sink receives trajectory 0's
// feedback-update history.
std::vector<TrajectoryOutcome> run_ensemble(const EnsembleSpec& spec,
                                            unsigned workers,
                                            const TraceSink* trace0 = nullptr);

// The per-trajectory true phase used by run_ensemble: zero, or a uniform
// draw on (-π, π] from the trajectory's auxiliary counter lane.
double trajectory_true_phase(const EnsembleSpec& spec, std::uint64_t index);

}  // namespace dyne
