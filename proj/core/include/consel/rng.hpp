#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace consel {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a substream identified by `tags` under a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

/// Seeded generator whose outputs are identical on every platform. Only the
/// raw mt19937_64 stream is used; the std distributions are implementation
/// defined and are avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);
  /// Index drawn proportionally to `weights` (non-negative, positive sum).
  std::size_t categorical(const std::vector<double>& weights);
  /// `count` distinct indices of [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace consel
