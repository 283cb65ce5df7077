#include "core/ensemble.hpp"

#include <atomic>
#include <thread>

#include "core/rng.hpp"

namespace dyne {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double trajectory_true_phase(const EnsembleSpec& spec, std::uint64_t index) {
  if (!spec.random_true_phase) return 0.0;
  NoiseStream stream(spec.master_seed, index);
  // (u - 1/2) * 2π maps [0,1) onto [-π, π).
  return (stream.aux_uniform(0) - 0.5) * kTwoPi;
}

namespace {

TrajectoryOutcome run_one(const EnsembleSpec& spec, std::uint64_t index,
                          const TraceSink* trace) {
  NoiseStream stream(spec.master_seed, index);
  const double theta = trajectory_true_phase(spec, index);
  try {
    TrajectoryOutcome out =
        run_trajectory(spec.initial, theta, spec.policy, spec.grid, stream, trace);
    out.trajectory_index = index;
    return out;
  } catch (const StateBlowupError&) {
    TrajectoryOutcome out;
    out.true_phase = theta;
    out.trajectory_index = index;
    out.failed = true;
    return out;
  }
}

}  // namespace

std::vector<TrajectoryOutcome> run_ensemble(const EnsembleSpec& spec,
                                            unsigned workers,
                                            const TraceSink* trace0) {
  const std::uint64_t n = spec.n_trajectories;
  std::vector<TrajectoryOutcome> outcomes(n);
  if (n == 0) return outcomes;
  if (workers == 0) workers = 1;

  auto body = [&](std::atomic<std::uint64_t>& next) {
    for (std::uint64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      outcomes[i] = run_one(spec, i, i == 0 ? trace0 : nullptr);
    }
  };

  if (workers == 1 || n == 1) {
    std::atomic<std::uint64_t> next{0};
    body(next);
    return outcomes;
  }

  std::atomic<std::uint64_t> next{0};
  const unsigned count =
      static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] { body(next); });
  }
  for (auto& t : pool) t.join();
  return outcomes;
}

}  // namespace dyne
