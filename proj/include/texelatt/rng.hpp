#pragma once

// Portable deterministic random numbers.
//
// std::mt19937_64 is fully specified by the standard, but the std
// distributions are not, so uniform draws are derived from raw engine bits
// here. The same seed yields the same stream on every platform.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace texelatt {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    if (span == 0) return std::int64_t(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return lo + std::int64_t(v % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream; deterministic in (seed, stream).
  Rng fork(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
  }

  /// Uniform point in the disk of the given radius.
  void uniform_in_disk(double radius, double& dx, double& dy) {
    const double r = radius * std::sqrt(uniform());
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    dx = r * std::cos(t);
    dy = r * std::sin(t);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace texelatt
