#pragma once

#include <cstdint>
#include <random>

#include "rankrec/linalg.hpp"

namespace rankrec {

/// Seeded source for all library randomness. Every stream derives from an
/// explicit 64-bit seed; nothing reads global entropy.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  /// Uniform integer in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  std::uint64_t next_seed() { return engine_(); }

  Vector gaussian_vector(std::size_t n);
  Matrix gaussian_matrix(std::size_t rows, std::size_t cols);
  /// Unit vector drawn uniformly from the sphere.
  Vector unit_vector(std::size_t n);
  /// k-sparse vector with Gaussian nonzeros on a uniformly random support.
  Vector sparse_vector(std::size_t n, std::size_t k);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Child seed for stream `index` of a base seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace rankrec
