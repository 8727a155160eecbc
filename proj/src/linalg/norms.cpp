#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankrec/linalg.hpp"

namespace rankrec {

namespace {

void require_quasi_norm_exponent(double p, const char* what) {
  if (!(p > 0.0 && p <= 1.0))
    throw ArgumentError(std::string(what) + ": p must lie in (0, 1], got " + std::to_string(p));
}

}  // namespace

Vector sorted_abs(const Vector& x) {
  std::vector<double> a(x.size());
  std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end(), std::greater<>());
  return Vector(std::move(a));
}

Vector top_k_vector(const Vector& x, std::size_t k) {
  if (k > x.size())
    throw ArgumentError("top_k_vector: k = " + std::to_string(k) + " exceeds dim " +
                        std::to_string(x.size()));
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  Vector out(x.size());
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = x[order[i]];
  return out;
}

Matrix top_k_matrix(const Matrix& x, std::size_t k) {
  const std::size_t r = std::min(x.rows(), x.cols());
  if (k > r)
    throw ArgumentError("top_k_matrix: k = " + std::to_string(k) + " exceeds min(n1, n2) = " +
                        std::to_string(r));
  if (k == r) return x;
  SvdResult s = svd(x);
  Matrix out(x.rows(), x.cols());
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double ui = s.U(i, t) * s.sigma[t];
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += ui * s.V(j, t);
    }
  }
  return out;
}

double l1(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double l2(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double lp_p(const Vector& x, double p) {
  require_quasi_norm_exponent(p, "lp_p");
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return s;
}

double nuclear(const Matrix& x) {
  const Vector s = singular_values(x);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

double frobenius(const Matrix& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.data()[i] * x.data()[i];
  return std::sqrt(s);
}

double schatten_p(const Matrix& x, double p) {
  require_quasi_norm_exponent(p, "schatten_p");
  return lp_p(singular_values(x), p);
}

double spectral(const Matrix& x) {
  const Vector s = singular_values(x);
  return s.empty() ? 0.0 : s[0];
}

}  // namespace rankrec
