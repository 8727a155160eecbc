#pragma once

// Certifiers for recovery conditions: restricted isometry / orthogonality
// constants, the spherical section constant, and nullspace-property margins.
// Exact certifiers enumerate and refuse above their caps; sampled certifiers
// return lower bounds on a maximum and say so (exact = false).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "rankrec/linalg.hpp"

namespace rankrec {

class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConditionKind { RIC, ROC, SSP, NspVector, NspMatrix, NspSchattenP };

std::string to_string(ConditionKind kind);
ConditionKind condition_kind_from_string(const std::string& s);

struct ConditionCertificate {
  ConditionKind kind = ConditionKind::RIC;
  double value = 0.0;
  std::size_t k = 0;
  std::optional<std::size_t> k2;
  std::optional<double> p;
  bool exact = false;
  /// Vector witnesses are stored as a single column. ROC stores the two unit
  /// vectors as the columns of an n x 2 matrix. Operator certificates store an
  /// n1 x n2 matrix.
  Matrix witness;
  std::uint64_t enumeration_size = 0;
  std::optional<std::uint64_t> seed;
};

struct EnumerationLimits {
  std::uint64_t max_supports = 1'000'000;
  std::size_t max_sign_dim = 20;
};

/// Orthonormal basis of the kernel of a measurement operator. For matrix maps
/// the columns are row-major vectorized n1 x n2 matrices.
struct NullspaceBasis {
  std::size_t n1 = 0;
  std::size_t n2 = 1;
  bool matrix_domain = false;
  Matrix basis;

  static NullspaceBasis of(const MeasurementOperator& op);
  /// Orthonormalizes the columns of `spanning` (vector domain).
  static NullspaceBasis from_span(const Matrix& spanning);

  std::size_t ambient() const { return basis.rows(); }
  std::size_t dim() const { return basis.cols(); }
  /// Kernel element sum_j c_j b_j, as a matrix (n1 x n2, or n x 1).
  Matrix element(const Vector& coords) const;
};

std::uint64_t binomial(std::size_t n, std::size_t k);

// ---------------------------------------------------------------------------
// Exact certifiers (vector side)

/// delta_k: max over |S| = k of max(sigma_max(A_S)^2 - 1, 1 - sigma_min(A_S)^2).
ConditionCertificate ric_exact(const Matrix& a, std::size_t k, const EnumerationLimits& lim = {});
ConditionCertificate ric_exact(const MeasurementOperator& a, std::size_t k,
                               const EnumerationLimits& lim = {});

/// theta_{k,k2}: max over disjoint supports of sigma_max(A_S^T A_S').
ConditionCertificate roc_exact(const Matrix& a, std::size_t k, std::size_t k2,
                               const EnumerationLimits& lim = {});
ConditionCertificate roc_exact(const MeasurementOperator& a, std::size_t k, std::size_t k2,
                               const EnumerationLimits& lim = {});

/// Delta = min over nonzero w in the subspace of ||w||_1^2 / ||w||_2^2.
/// The minimum is attained at a vertex of {w in L : ||w||_1 <= 1}, i.e. at a
/// subspace element vanishing on a rank-(d-1) set of coordinates; all C(n, d-1)
/// such zero sets are enumerated.
ConditionCertificate ssp_exact(const NullspaceBasis& ns, const EnumerationLimits& lim = {});

/// max over w in the subspace with ||w||_1 = 1 of ||w^k||_1 - ||w - w^k||_1.
/// The nullspace condition for k-sparse recovery holds iff the value is < 0.
/// One LP per (support, sign pattern) pair, solved by the dense simplex.
ConditionCertificate nsp_margin_vector(const NullspaceBasis& ns, std::size_t k,
                                       const EnumerationLimits& lim = {});

// ---------------------------------------------------------------------------
// Sampled certifiers (matrix side)

/// Max over sampled Haar pairs of ric_exact(A_{U,V}, k). Lower bound on the
/// operator RIC; witness is U diag(x*) V^T with unit Frobenius norm.
ConditionCertificate ric_operator_sampled(const MeasurementOperator& op, std::size_t k,
                                          std::size_t pairs, std::uint64_t seed);

/// Spectral objective over kernel elements: value and d value / d sigma_i.
/// Must be invariant to positive scaling of W.
using SpectralObjective = std::function<double(const Vector& sigma, Vector* grad)>;

struct KernelSearchOptions {
  std::size_t samples = 200;
  std::size_t restarts = 50;
  std::size_t max_iterations = 500;
  std::uint64_t seed = 0;
};

struct KernelSearchResult {
  double value = 0.0;
  Matrix witness;  // unit Frobenius norm
  Vector coords;
  std::size_t evaluations = 0;
  /// True when the kernel is one-dimensional and the objective is even, so the
  /// two candidates +-b_1 exhaust the unit sphere.
  bool exhaustive = false;
};

/// Maximizes a spectral objective over unit-Frobenius kernel elements: random
/// kernel combinations followed by projected gradient ascent with step halving
/// from the best starts. Returns a lower bound on the true maximum.
KernelSearchResult maximize_over_kernel(const NullspaceBasis& ns, const SpectralObjective& f,
                                        const KernelSearchOptions& opts);

/// (sum_{i<=k} sigma_i - sum_{i>k} sigma_i) / ||W||_*.
SpectralObjective nuclear_nsp_objective(std::size_t k);
/// (sum_{i<=k} sigma_i^p - sum_{i>k} sigma_i^p) / sum sigma_i^p.
SpectralObjective schatten_nsp_objective(std::size_t k, double p);

/// Sampled nullspace margin for rank-k recovery by nuclear norm minimization.
/// value >= 0 certifies failure (witness provided); value < 0 means no
/// violation was found. Throws DegenerateError for a trivial kernel.
ConditionCertificate nsp_margin_matrix_sampled(const MeasurementOperator& op, std::size_t k,
                                               std::size_t samples, std::uint64_t seed);

/// Schatten-p analogue of nsp_margin_matrix_sampled.
ConditionCertificate nsp_margin_schatten_sampled(const MeasurementOperator& op, std::size_t k,
                                                 double p, std::size_t samples,
                                                 std::uint64_t seed);

// ---------------------------------------------------------------------------
// Witness re-evaluation (certificates are self-verifying)

/// Recomputes the certified quantity at the stored witness.
double evaluate_witness(const ConditionCertificate& cert, const MeasurementOperator& op);

}  // namespace rankrec
