#include "rankrec/random.hpp"

#include <algorithm>
#include <numeric>

namespace rankrec {

Vector Rng::gaussian_vector(std::size_t n) {
  Vector v(n);
  for (double& x : v) x = normal();
  return v;
}

Matrix Rng::gaussian_matrix(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = normal();
  return m;
}

Vector Rng::unit_vector(std::size_t n) {
  Vector v = gaussian_vector(n);
  double nrm = l2(v);
  while (nrm == 0.0) {
    v = gaussian_vector(n);
    nrm = l2(v);
  }
  return (1.0 / nrm) * v;
}

Vector Rng::sparse_vector(std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates with our own index draws keeps the stream portable.
  for (std::size_t i = 0; i < k && i < n; ++i) std::swap(idx[i], idx[index(i, n - 1)]);
  Vector v(n);
  for (std::size_t i = 0; i < k && i < n; ++i) v[idx[i]] = normal();
  return v;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace rankrec
