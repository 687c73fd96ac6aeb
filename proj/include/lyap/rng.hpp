#pragma once

#include <cstdint>
#include <random>

namespace lyap {

/// Independent, reproducible random stream identified by (seed, stream index).
/// Per-candidate streams make sampling independent of evaluation order.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Log-uniform in [lo, hi], lo > 0.
  double log_uniform(double lo, double hi);
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lyap
