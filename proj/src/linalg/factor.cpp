#include <cmath>

#include "rankrec/linalg.hpp"

namespace rankrec {

QrResult qr(const Matrix& a, bool full) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  const std::size_t steps = std::min(rows, cols);
  Matrix r = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(steps);

  for (std::size_t j = 0; j < steps; ++j) {
    Vector v(rows - j);
    for (std::size_t i = j; i < rows; ++i) v[i - j] = r(i, j);
    const double norm = l2(v);
    if (norm == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    const double alpha = v[0] > 0.0 ? -norm : norm;
    v[0] -= alpha;
    const double vv = dot(v, v);
    if (vv == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    for (std::size_t c = j; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < rows; ++i) s += v[i - j] * r(i, c);
      s *= 2.0 / vv;
      for (std::size_t i = j; i < rows; ++i) r(i, c) -= s * v[i - j];
    }
    for (std::size_t i = j + 1; i < rows; ++i) r(i, j) = 0.0;
    reflectors.push_back(std::move(v));
  }

  Matrix q = Matrix::identity(rows);
  for (std::size_t jj = steps; jj-- > 0;) {
    const Vector& v = reflectors[jj];
    if (v.empty()) continue;
    const double vv = dot(v, v);
    for (std::size_t c = 0; c < rows; ++c) {
      double s = 0.0;
      for (std::size_t i = jj; i < rows; ++i) s += v[i - jj] * q(i, c);
      s *= 2.0 / vv;
      for (std::size_t i = jj; i < rows; ++i) q(i, c) -= s * v[i - jj];
    }
  }

  for (std::size_t i = 0; i < steps; ++i) {
    if (r(i, i) < 0.0) {
      for (std::size_t c = 0; c < cols; ++c) r(i, c) = -r(i, c);
      for (std::size_t k = 0; k < rows; ++k) q(k, i) = -q(k, i);
    }
  }

  if (full || rows <= cols) return {std::move(q), std::move(r)};
  return {q.block(0, 0, rows, cols), r.block(0, 0, cols, cols)};
}

Matrix orthogonal_complement(const Matrix& q) {
  const std::size_t n = q.rows();
  const std::size_t r = q.cols();
  if (r == 0) return Matrix::identity(n);
  if (r >= n) return Matrix(n, 0);
  QrResult f = qr(q, true);
  return f.Q.block(0, r, n, n - r);
}

Matrix nullspace(const Matrix& a) {
  const std::size_t n = a.cols();
  if (a.rows() == 0) return Matrix::identity(n);
  SvdResult s = svd(a);
  const std::size_t rank = numerical_rank(s.sigma);
  if (rank == 0) return Matrix::identity(n);
  return orthogonal_complement(s.V.block(0, 0, n, rank));
}

Matrix pinv(const Matrix& a) {
  SvdResult s = svd(a);
  const std::size_t rank = numerical_rank(s.sigma);
  Matrix out(a.cols(), a.rows());
  for (std::size_t k = 0; k < rank; ++k) {
    const double inv = 1.0 / s.sigma[k];
    for (std::size_t i = 0; i < out.rows(); ++i) {
      const double vik = s.V(i, k) * inv;
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += vik * s.U(j, k);
    }
  }
  return out;
}

Vector min_norm_solve(const Matrix& a, const Vector& b) {
  if (b.size() != a.rows()) throw ArgumentError("min_norm_solve: dimension mismatch");
  SvdResult s = svd(a);
  const std::size_t rank = numerical_rank(s.sigma);
  Vector x(a.cols());
  for (std::size_t k = 0; k < rank; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) c += s.U(i, k) * b[i];
    c /= s.sigma[k];
    for (std::size_t i = 0; i < a.cols(); ++i) x[i] += c * s.V(i, k);
  }
  return x;
}

}  // namespace rankrec
