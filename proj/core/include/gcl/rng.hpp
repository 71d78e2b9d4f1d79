#pragma once

#include <cstdint>
#include <random>

namespace gcl {

// splitmix64 finalizer. Cheap, well-mixed, and stateless, which is what we
// want for deriving independent per-trial seeds from a base seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trial `trial` at circuit size `size` under a sweep base seed.
// Mixing after every ingredient keeps trials decorrelated even when base,
// size and trial are all small integers, and adding sizes or trials to a
// sweep never changes the seeds of trials that already existed.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t size,
                                   std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(base) ^ size) ^ trial);
}

// Single sequential random stream. Every stochastic operation inside one
// training run draws from one Rng in a documented order; that is the whole
// reproducibility story, so nothing else in the library may create engines.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Standard normal draw.
  double gauss() { return normal_(engine_); }

  // Uniform on [0, 1).
  double uniform() { return unit_(engine_); }

  // True with probability p. p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace gcl
