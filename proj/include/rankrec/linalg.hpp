#pragma once

// Dense linear algebra kernel shared by every other module: row-major matrices,
// a one-sided Jacobi SVD, truncations, norms, Haar-random unitary pairs and the
// restriction of a matrix-space operator to a unitary pair.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankrec {

/// Library-wide numerical tolerances. One record so every threshold is visible
/// in a single place; callers take `tolerances()` rather than hard-coding.
struct Tolerances {
  double orthogonality = 1e-10;     // U^T U = I, V^T V = I (Frobenius)
  double reconstruction = 1e-9;     // relative ||U S V^T - M||_F
  double rank_relative = 1e-12;     // sigma_i <= rank_relative * sigma_1 counts as zero
  double adjoint = 1e-12;           // <A x, y> vs <x, A^T y>
  double restriction_probe = 1e-10; // relative, restriction vs direct evaluation
  double kernel_residual = 1e-9;    // ||A b|| for nullspace basis vectors
  double slack = 1e-9;              // additive inequality slack (scaled by magnitude)
  double witness_relative = 1e-8;   // certificate witness re-evaluation
  double jacobi_threshold = 1e-15;  // off-diagonal cosine below which a Jacobi pair is skipped
};

const Tolerances& tolerances();

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }
  std::span<const double> span() const { return data_; }
  std::span<double> span() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const;

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  Vector& operator*=(double s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

double dot(const Vector& a, const Vector& b);

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);
  /// rows x cols with d on the leading diagonal.
  static Matrix diagonal(const Vector& d, std::size_t rows, std::size_t cols);
  static Matrix from_column(const Vector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vector col(std::size_t j) const;
  void set_col(std::size_t j, const Vector& v);
  Vector diag() const;

  /// Row-major vectorization, vec(X)[i * cols + j] = X(i, j).
  Vector vec() const { return Vector(data_); }
  static Matrix unvec(const Vector& v, std::size_t rows, std::size_t cols);

  Matrix transpose() const;
  Matrix cols_subset(std::span<const std::size_t> idx) const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  bool all_finite() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
/// a^T x without forming the transpose.
Vector transpose_times(const Matrix& a, const Vector& x);
/// a^T b without forming the transpose.
Matrix transpose_times(const Matrix& a, const Matrix& b);

double frobenius_inner(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Factorizations

/// X = U diag(sigma) V^T with r = min(rows, cols); U is rows x r, V is cols x r.
/// For rows <= cols this is exactly the U (n1 x n1), V (n2 x n1) convention.
struct SvdResult {
  Matrix U;
  Vector sigma;
  Matrix V;

  Matrix reconstruct() const;
};

/// One-sided Jacobi SVD. Singular values are sorted non-increasing; the first
/// entry of magnitude above 1e-12 in each column of U is positive.
/// Throws NumericalError when the sweep cap 100 * max(rows, cols) is hit.
SvdResult svd(const Matrix& m);

/// Singular values only (same algorithm, no factor accumulation).
Vector singular_values(const Matrix& m);

/// Number of singular values above rank_relative * sigma_1.
std::size_t numerical_rank(const Vector& sigma);

struct QrResult {
  Matrix Q;  // rows x rows when full, rows x cols when thin
  Matrix R;  // Q.cols() x cols
};

/// Householder QR with the diagonal of R made non-negative.
QrResult qr(const Matrix& a, bool full = false);

/// Orthonormal basis of the orthogonal complement of span(columns of q), where q
/// has orthonormal columns.
Matrix orthogonal_complement(const Matrix& q);

/// Orthonormal basis (columns) of ker(a).
Matrix nullspace(const Matrix& a);

/// Moore-Penrose pseudo-inverse via SVD with the library rank threshold.
Matrix pinv(const Matrix& a);

/// Minimum-norm least-squares solution of a x = b.
Vector min_norm_solve(const Matrix& a, const Vector& b);

// ---------------------------------------------------------------------------
// Sorting, truncation and norms

/// Absolute values sorted non-increasing.
Vector sorted_abs(const Vector& x);

/// Keeps the k largest-magnitude entries (ties: lowest index wins), zero elsewhere.
Vector top_k_vector(const Vector& x, std::size_t k);

/// First k terms of the SVD of X; the best rank-k approximation.
Matrix top_k_matrix(const Matrix& x, std::size_t k);

double l1(const Vector& x);
double l2(const Vector& x);
/// sum |x_i|^p for 0 < p <= 1.
double lp_p(const Vector& x, double p);
double nuclear(const Matrix& x);
double frobenius(const Matrix& x);
/// sum sigma_i(X)^p for 0 < p <= 1.
double schatten_p(const Matrix& x, double p);
double spectral(const Matrix& x);

// ---------------------------------------------------------------------------
// Unitary pairs, operators and restrictions

/// U (n1 x n1) orthogonal, V (n2 x n1) with orthonormal columns.
struct UnitaryPair {
  Matrix U;
  Matrix V;

  std::size_t n1() const { return U.rows(); }
  std::size_t n2() const { return V.rows(); }
  /// U diag(x) V^T, an element of S(U, V).
  Matrix lift(const Vector& x) const;
};

/// Validates the UnitaryPair invariants, throwing ArgumentError on violation.
void validate(const UnitaryPair& pair);

/// Haar-distributed pair from Gaussian matrices orthonormalized by QR with a
/// sign-fixed diagonal. Deterministic per seed. Requires n1 <= n2.
UnitaryPair haar_unitary_pair(std::size_t n1, std::size_t n2, std::uint64_t seed);

/// Dense linear map R^n -> R^m or R^{n1 x n2} -> R^m, stored as its m x N
/// coefficient matrix acting on the (row-major) vectorized input.
class MeasurementOperator {
 public:
  enum class Kind { Vector, Matrix };

  static MeasurementOperator vector_map(Matrix coefficients);
  static MeasurementOperator matrix_map(Matrix coefficients, std::size_t n1, std::size_t n2);
  /// vec(.) as an operator on n1 x n2 matrices (m = n1 * n2).
  static MeasurementOperator vectorization_identity(std::size_t n1, std::size_t n2);

  Kind kind() const { return kind_; }
  bool is_matrix_map() const { return kind_ == Kind::Matrix; }
  std::size_t m() const { return coefficients_.rows(); }
  /// Domain dimension (n, or n1 * n2).
  std::size_t n() const { return coefficients_.cols(); }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  const Matrix& coefficients() const { return coefficients_; }

  Vector apply(const Vector& x) const;
  Vector apply(const Matrix& x) const;
  Vector adjoint(const Vector& y) const;
  Matrix adjoint_matrix(const Vector& y) const;

  MeasurementOperator scaled(double s) const;
  MeasurementOperator plus(const MeasurementOperator& o) const;

 private:
  MeasurementOperator(Kind kind, Matrix coefficients, std::size_t n1, std::size_t n2);

  Kind kind_ = Kind::Vector;
  Matrix coefficients_;
  std::size_t n1_ = 0;
  std::size_t n2_ = 1;
};

/// A_{U,V}: the m x n1 matrix with A_{U,V} x = A(U diag(x) V^T).
struct RestrictionMatrix {
  MeasurementOperator parent;
  UnitaryPair pair;
  Matrix matrix;

  Vector apply(const Vector& x) const { return matrix * x; }
};

RestrictionMatrix restrict(const MeasurementOperator& op, const UnitaryPair& pair);

// ---------------------------------------------------------------------------
// Text format: "rows cols" header, then rows lines of cols floats.

Matrix parse_matrix(std::istream& in);
Matrix parse_matrix(const std::string& text);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& m);
std::string format_matrix(const Matrix& m);

}  // namespace rankrec
