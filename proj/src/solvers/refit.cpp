#include "refit.hpp"

#include <algorithm>
#include <cmath>

namespace rankrec::detail {

Vector support_refit(const Matrix& a, const Vector& y, const Vector& x, double rel) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > rel * peak && x[i] != 0.0) support.push_back(i);
  Vector out(x.size());
  if (support.empty()) return out;
  const Vector c = min_norm_solve(a.cols_subset(support), y);
  for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = c[i];
  return out;
}

Vector subspace_refit(const MeasurementOperator& op, const Vector& y, const Vector& x, double rel) {
  const std::size_t n1 = op.n1();
  const std::size_t n2 = op.n2();
  const SvdResult s = svd(Matrix::unvec(x, n1, n2));
  std::size_t r = 0;
  while (r < s.sigma.size() && s.sigma[r] > rel * s.sigma[0] && s.sigma[r] > 0.0) ++r;
  if (r == 0) return Vector(n1 * n2);

  auto basis = [&](std::size_t p, std::size_t q) {
    Matrix e(n1, n2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) e(i, j) = s.U(i, p) * s.V(j, q);
    return e;
  };
  Matrix b(op.m(), r * r);
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < r; ++q) b.set_col(p * r + q, op.apply(basis(p, q)));
  const Vector c = min_norm_solve(b, y);
  Matrix out(n1, n2);
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < r; ++q)
      if (c[p * r + q] != 0.0) out += c[p * r + q] * basis(p, q);
  return out.vec();
}

}  // namespace rankrec::detail
