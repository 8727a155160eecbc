#pragma once

// Recovery programs: l1 / nuclear-norm minimization under an l2 residual bound
// (ADMM), and IRLS for the lp and Schatten-p quasi-norms.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rankrec/linalg.hpp"

namespace rankrec {

/// Raised when no point satisfies ||A(x) - y|| <= epsilon. `residual` is the
/// minimum achievable residual, which certifies the failure.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct SolverConfig {
  std::size_t max_iterations = 50'000;
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double rho = 1.0;
  double gamma0 = 1.0;
  double gamma_decay = 0.1;
  double gamma_min = 1e-10;
  double p = 1.0;
  std::uint64_t seed = 0;
  /// Least-squares refit on the support (or singular subspaces) of the
  /// estimate, for equality-constrained problems. A refit is kept only when it
  /// is feasible and does not increase the objective; with polish off, IRLS
  /// returns its last iterate unchanged.
  bool polish = true;
  /// Every n-th iteration is recorded in the history (the last one always is).
  std::size_t history_stride = 100;
};

/// Throws ArgumentError unless every field is in range.
void validate(const SolverConfig& cfg);

struct RecoveryProblem {
  MeasurementOperator op = MeasurementOperator::vector_map(Matrix(0, 0));
  Vector y;
  double epsilon = 0.0;
  /// Planted signal: n x 1 for vector maps, n1 x n2 for matrix maps.
  std::optional<Matrix> x0;
  std::optional<Vector> z;
  std::optional<std::uint64_t> seed;

  bool is_matrix() const { return op.is_matrix_map(); }
};

/// Builds y = A(x0) + z and records the ground truth.
RecoveryProblem plant(const MeasurementOperator& op, const Matrix& x0, double epsilon = 0.0,
                      std::optional<Vector> z = std::nullopt);

/// Shape and ground-truth consistency checks.
void validate(const RecoveryProblem& prob);

struct IterationRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// IRLS only.
  double gamma = 0.0;
  double smoothed_before = 0.0;
  double smoothed_after = 0.0;
};

struct RecoverySolution {
  /// n x 1 for vector problems.
  Matrix estimate;
  double objective = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool polished = false;
  std::vector<IterationRecord> history;

  Vector vector() const { return estimate.vec(); }
};

/// l1 (vector) or nuclear (matrix) norm, by problem domain.
double recovery_norm(const RecoveryProblem& prob, const Matrix& x);
double residual_norm(const RecoveryProblem& prob, const Matrix& x);

/// minimize ||x||_1 subject to ||A x - y||_2 <= epsilon.
RecoverySolution solve_l1(const RecoveryProblem& prob, const SolverConfig& cfg = {});
/// minimize ||X||_* subject to ||A(X) - y||_2 <= epsilon.
RecoverySolution solve_nuclear(const RecoveryProblem& prob, const SolverConfig& cfg = {});

/// Singular value thresholding: the proximal map of tau ||.||_*.
Matrix svt(const Matrix& x, double tau);
Vector soft_threshold(const Vector& x, double tau);

/// IRLS for minimize sum |x_i|^p subject to A x = y (cfg.p in (0, 1]).
RecoverySolution solve_irls_lp(const RecoveryProblem& prob, const SolverConfig& cfg = {});
/// IRLS for minimize Tr |X|^p subject to A(X) = y.
RecoverySolution solve_irls_schatten_p(const RecoveryProblem& prob, const SolverConfig& cfg = {});

/// Feasible and no larger in norm than the planted signal, both to 1e-9.
bool is_as_good_as(const Matrix& candidate, const RecoveryProblem& prob);

}  // namespace rankrec
