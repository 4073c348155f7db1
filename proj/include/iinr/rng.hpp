#pragma once

// Seeded random source. Every stochastic component (weight init, latent
// fields, training noise, task corruption) owns an Rng forked from the run
// seed, so a fixed seed reproduces the whole run bitwise.

#include "iinr/tensor.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>

namespace iinr {

namespace detail {
// splitmix64; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Independent generator for a named substream.
  Rng fork(std::uint64_t salt) const {
    return Rng(detail::mix64(seed_ ^ detail::mix64(salt + 0x51ed2701)));
  }

  double uniform() { return unif_(gen_); }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return norm_(gen_); }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

inline Mat gaussian(Rng& rng, index_t rows, index_t cols) {
  if (rows < 1 || cols < 1) throw ShapeError("gaussian: rows/cols must be >= 1");
  Mat out(rows, cols);
  for (auto& v : out.data) v = rng.normal();
  return out;
}

// Poisson sampler: Knuth inversion below lambda=30, rounded normal
// approximation (clamped at zero) above. Rates in this codebase stay near
// the photon-count scale, where the approximation error is negligible.
inline long poisson(Rng& rng, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::domain_error("poisson: lambda must be finite and >= 0");
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) {
    const double limit = std::exp(-lambda);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= rng.uniform();
    } while (p > limit);
    return k - 1;
  }
  const double x = std::round(lambda + std::sqrt(lambda) * rng.normal());
  return x < 0.0 ? 0 : static_cast<long>(x);
}

}  // namespace iinr
