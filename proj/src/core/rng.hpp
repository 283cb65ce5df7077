#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dyne {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Every 128-bit block is a pure function of (counter, key), so any sample
// anywhere in an ensemble can be regenerated in isolation. That is what
// makes parallel runs bit-identical regardless of worker scheduling.
struct Philox4x32 {
  using ctr_t = std::array<std::uint32_t, 4>;
  using key_t = std::array<std::uint32_t, 2>;

  static ctr_t block(ctr_t ctr, key_t key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
      const std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9u;  // golden-ratio Weyl increments, per the paper
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }
};

// Gaussian stream for one trajectory, keyed by (master seed, trajectory
// index). Counter layout: words 0-1 hold the trajectory index, words 2-3
// the Box-Muller pair index, so draw k of trajectory j is reproducible
// without generating anything else.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        traj_lo_(static_cast<std::uint32_t>(trajectory)),
        traj_hi_(static_cast<std::uint32_t>(trajectory >> 32)) {}

  // Standard normal deviates in a fixed order (two per Philox block).
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const auto r = Philox4x32::block(
        {traj_lo_, traj_hi_, static_cast<std::uint32_t>(pair_),
         static_cast<std::uint32_t>(pair_ >> 32)},
        key_);
    ++pair_;
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
  }

  // One uniform in [0, 1) from a dedicated counter region (pair indices
  // >= 2^63 are never reached by next_normal), used for per-trajectory
  // auxiliary draws such as a random true phase.
  double aux_uniform(std::uint32_t tag) const {
    const auto r = Philox4x32::block(
        {traj_lo_, traj_hi_, tag, 0x80000000u}, key_);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    return static_cast<double>(a >> 11) * 0x1.0p-53;
  }

 private:
  Philox4x32::key_t key_;
  std::uint32_t traj_lo_, traj_hi_;
  std::uint64_t pair_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Gaussian increment with variance dv (the Wiener increment dW).
inline double wiener_increment(NoiseStream& stream, double dv) {
  return stream.next_normal() * std::sqrt(dv);
}

}  // namespace dyne
