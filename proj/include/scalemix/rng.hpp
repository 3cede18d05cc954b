#pragma once

#include <cstdint>

namespace scalemix {

/// Counter-based generator: draw k of a stream with key K is
/// splitmix64_finalize(K + (k + 1) * 0x9E3779B97F4A7C15). Streams are cheap to
/// derive and any draw can be recomputed in isolation.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Independent stream for (seed, sample size, replication).
  static CounterRng substream(std::uint64_t seed, std::uint64_t n, std::uint64_t replication);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Uniform on [lo, hi].
  double uniform(double lo, double hi);
  /// Standard normal through the inverse CDF.
  double normal();
  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_finalize(std::uint64_t z);

}  // namespace scalemix
