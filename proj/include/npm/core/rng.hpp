#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace npm {

/// Seeded random stream. Identical seeds give identical draw sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  double normal();
  /// Draws an index with probability proportional to `weights`.
  std::size_t categorical(std::span<const double> weights);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream derived from this stream's seed and `stream_id`.
  Rng derive(std::uint64_t stream_id) const;

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace npm
