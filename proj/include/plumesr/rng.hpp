#pragma once

#include <cstdint>

namespace plumesr {

/// splitmix64 stream. Single owner; fork with derive_seed instead of sharing.
class Rng64 {
public:
  explicit Rng64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_f64();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_f64(); }
  /// Uniform integer in [lo, hi] (inclusive). Requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::uint64_t state() const { return state_; }

private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// The two multiply-xorshift rounds that finish a splitmix64 draw.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Seed for child stream `index` of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace plumesr
