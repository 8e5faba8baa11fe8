#pragma once

#include <cstdint>

namespace polpair {

/// Deterministic 64-bit generator (splitmix64). Used for every stochastic
/// draw in the toolkit so that results depend only on the seeds we derive,
/// not on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = n * ((~0ULL) / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller.
  double normal();

  /// Poisson sample with the given mean. Exact for all means: Knuth's
  /// product method below 10, Hormann's PTRS transformed rejection above.
  std::int64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

/// Derives an independent substream seed from a root seed and a set of
/// tags (campaign id, record index, channel, ...). Combining is a chain of
/// splitmix64 steps, so any tag change decorrelates the whole stream.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag0, std::uint64_t tag1 = 0,
                          std::uint64_t tag2 = 0);

} // namespace polpair
