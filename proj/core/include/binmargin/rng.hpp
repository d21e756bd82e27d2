#pragma once

#include <cstdint>
#include <limits>

namespace binmargin {

/// Counter-based SplitMix64 stream.
///
/// Output i of a stream is mix64(key + (i + 1) * 0x9E3779B97F4A7C15), where
/// key = mix64(seed) ^ mix64(stream + 0xD1B54A32D192ED03) and mix64 is the
/// SplitMix64 finalizer. The (seed, stream) pair fully determines the output,
/// so independent streams are obtained by varying `stream`.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent stream derived from this generator's seed.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream_ * 0x100000001B3ULL + stream + 1); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

/// Seed for the index-th independent sub-experiment of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return Rng(seed, index + 1).next(); }

}  // namespace binmargin
