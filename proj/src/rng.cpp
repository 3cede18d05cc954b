#include "scalemix/rng.hpp"

#include "scalemix/error.hpp"
#include "scalemix/normal.hpp"

namespace scalemix {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng CounterRng::substream(std::uint64_t seed, std::uint64_t n, std::uint64_t replication) {
  std::uint64_t k = splitmix64_finalize(seed + kGolden);
  k = splitmix64_finalize(k ^ (n + 0x632BE59BD9B4E019ULL));
  k = splitmix64_finalize(k ^ (replication + 0x8CB92BA72F3D8DD7ULL));
  return CounterRng(k);
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return splitmix64_finalize(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  // (j + 0.5) / 2^53 with j in [0, 2^53): never 0 or 1.
  const std::uint64_t j = next_u64() >> 11;
  return (static_cast<double>(j) + 0.5) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() { return standard_normal_quantile(uniform()); }

std::uint64_t CounterRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("CounterRng::below: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

}  // namespace scalemix
