#include <cmath>
#include <random>

#include "rankrec/linalg.hpp"

namespace rankrec {

Matrix UnitaryPair::lift(const Vector& x) const {
  if (x.size() != n1()) throw ArgumentError("UnitaryPair::lift: expected length n1");
  Matrix out(n1(), n2());
  for (std::size_t i = 0; i < n1(); ++i)
    for (std::size_t j = 0; j < n2(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n1(); ++k) s += U(i, k) * x[k] * V(j, k);
      out(i, j) = s;
    }
  return out;
}

void validate(const UnitaryPair& pair) {
  const std::size_t n1 = pair.U.rows();
  if (pair.U.cols() != n1 || pair.V.cols() != n1 || pair.V.rows() < n1)
    throw ArgumentError("UnitaryPair: expected U n1 x n1 and V n2 x n1 with n1 <= n2");
  const double tol = tolerances().orthogonality;
  const Matrix eye = Matrix::identity(n1);
  if (frobenius(transpose_times(pair.U, pair.U) - eye) > tol ||
      frobenius(pair.U * pair.U.transpose() - eye) > tol ||
      frobenius(transpose_times(pair.V, pair.V) - eye) > tol)
    throw ArgumentError("UnitaryPair: factors are not orthonormal");
}

UnitaryPair haar_unitary_pair(std::size_t n1, std::size_t n2, std::uint64_t seed) {
  if (n1 > n2) throw ArgumentError("haar_unitary_pair: requires n1 <= n2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix gu(n1, n1);
  for (std::size_t i = 0; i < gu.size(); ++i) gu.data()[i] = normal(rng);
  Matrix gv(n2, n1);
  for (std::size_t i = 0; i < gv.size(); ++i) gv.data()[i] = normal(rng);
  return {qr(gu, true).Q, qr(gv, false).Q};
}

MeasurementOperator::MeasurementOperator(Kind kind, Matrix coefficients, std::size_t n1,
                                         std::size_t n2)
    : kind_(kind), coefficients_(std::move(coefficients)), n1_(n1), n2_(n2) {
  if (coefficients_.cols() != n1_ * n2_)
    throw ArgumentError("MeasurementOperator: coefficient matrix has " +
                        std::to_string(coefficients_.cols()) + " columns, domain needs " +
                        std::to_string(n1_ * n2_));
  if (!coefficients_.all_finite())
    throw ArgumentError("MeasurementOperator: non-finite coefficients");
}

MeasurementOperator MeasurementOperator::vector_map(Matrix coefficients) {
  const std::size_t n = coefficients.cols();
  return {Kind::Vector, std::move(coefficients), n, 1};
}

MeasurementOperator MeasurementOperator::matrix_map(Matrix coefficients, std::size_t n1,
                                                    std::size_t n2) {
  return {Kind::Matrix, std::move(coefficients), n1, n2};
}

MeasurementOperator MeasurementOperator::vectorization_identity(std::size_t n1, std::size_t n2) {
  return matrix_map(Matrix::identity(n1 * n2), n1, n2);
}

Vector MeasurementOperator::apply(const Vector& x) const {
  if (x.size() != n()) throw ArgumentError("MeasurementOperator::apply: dimension mismatch");
  return coefficients_ * x;
}

Vector MeasurementOperator::apply(const Matrix& x) const {
  if (!is_matrix_map() || x.rows() != n1_ || x.cols() != n2_)
    throw ArgumentError("MeasurementOperator::apply: expected an n1 x n2 matrix");
  return coefficients_ * x.vec();
}

Vector MeasurementOperator::adjoint(const Vector& y) const {
  if (y.size() != m()) throw ArgumentError("MeasurementOperator::adjoint: dimension mismatch");
  return transpose_times(coefficients_, y);
}

Matrix MeasurementOperator::adjoint_matrix(const Vector& y) const {
  return Matrix::unvec(adjoint(y), n1_, n2_);
}

MeasurementOperator MeasurementOperator::scaled(double s) const {
  return {kind_, s * coefficients_, n1_, n2_};
}

MeasurementOperator MeasurementOperator::plus(const MeasurementOperator& o) const {
  if (o.kind_ != kind_ || o.n1_ != n1_ || o.n2_ != n2_ || o.m() != m())
    throw ArgumentError("MeasurementOperator::plus: operators have different shapes");
  return {kind_, coefficients_ + o.coefficients_, n1_, n2_};
}

RestrictionMatrix restrict(const MeasurementOperator& op, const UnitaryPair& pair) {
  if (!op.is_matrix_map()) throw ArgumentError("restrict: operator must act on matrices");
  if (pair.n1() != op.n1() || pair.n2() != op.n2() || pair.V.cols() != op.n1())
    throw ArgumentError("restrict: unitary pair does not match the operator domain");
  const std::size_t n1 = op.n1();
  const std::size_t n2 = op.n2();
  Matrix out(op.m(), n1);
  Vector outer(n1 * n2);
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n2; ++b) outer[a * n2 + b] = pair.U(a, j) * pair.V(b, j);
    out.set_col(j, op.coefficients() * outer);
  }
  return {op, pair, std::move(out)};
}

}  // namespace rankrec
