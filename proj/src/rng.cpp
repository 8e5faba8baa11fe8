#include "polpair/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace polpair {

double Rng::normal() {
  // Box-Muller; discards the second variate to keep the stream layout simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

namespace {

std::int64_t poisson_knuth(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

// Hormann (1993) PTRS sampler, valid for mean >= 10.
std::int64_t poisson_ptrs(Rng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * loglam - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

} // namespace

std::int64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_knuth(*this, mean);
  return poisson_ptrs(*this, mean);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag0, std::uint64_t tag1,
                          std::uint64_t tag2) {
  Rng mix(root ^ 0xA0761D6478BD642FULL);
  std::uint64_t s = mix.next_u64();
  s ^= tag0 + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  s = Rng(s).next_u64();
  s ^= tag1 + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  s = Rng(s).next_u64();
  s ^= tag2 + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  return Rng(s).next_u64();
}

} // namespace polpair
