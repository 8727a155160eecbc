#include <cmath>

#include "rankrec/solvers.hpp"

namespace rankrec {

void validate(const SolverConfig& cfg) {
  if (cfg.max_iterations == 0) throw ArgumentError("solver config: max_iterations must be positive");
  if (!(cfg.primal_tolerance > 0.0) || !(cfg.dual_tolerance > 0.0))
    throw ArgumentError("solver config: tolerances must be positive");
  if (!(cfg.rho > 0.0)) throw ArgumentError("solver config: rho must be positive");
  if (!(cfg.gamma0 > 0.0) || !(cfg.gamma_min > 0.0))
    throw ArgumentError("solver config: gamma0 and gamma_min must be positive");
  if (!(cfg.gamma_decay > 0.0 && cfg.gamma_decay < 1.0))
    throw ArgumentError("solver config: gamma decay must lie strictly inside (0, 1)");
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw ArgumentError("solver config: p must lie in (0, 1]");
  if (cfg.history_stride == 0) throw ArgumentError("solver config: history_stride must be positive");
}

namespace {

Vector apply_op(const MeasurementOperator& op, const Matrix& x) {
  return op.is_matrix_map() ? op.apply(x) : op.apply(x.vec());
}

void check_shape(const RecoveryProblem& prob, const Matrix& x, const char* what) {
  const auto& op = prob.op;
  const bool ok = op.is_matrix_map() ? (x.rows() == op.n1() && x.cols() == op.n2())
                                     : (x.rows() == op.n() && x.cols() == 1);
  if (!ok) throw ArgumentError(std::string(what) + ": shape does not match the operator domain");
}

}  // namespace

RecoveryProblem plant(const MeasurementOperator& op, const Matrix& x0, double epsilon,
                      std::optional<Vector> z) {
  RecoveryProblem prob;
  prob.op = op;
  prob.epsilon = epsilon;
  check_shape(prob, x0, "plant");
  prob.y = apply_op(op, x0);
  if (z) {
    if (z->size() != op.m()) throw ArgumentError("plant: noise length must equal m");
    prob.y += *z;
  }
  prob.x0 = x0;
  prob.z = std::move(z);
  validate(prob);
  return prob;
}

void validate(const RecoveryProblem& prob) {
  if (prob.y.size() != prob.op.m()) throw ArgumentError("problem: y must have length m");
  if (!prob.y.all_finite()) throw ArgumentError("problem: y has non-finite entries");
  if (!(prob.epsilon >= 0.0) || !std::isfinite(prob.epsilon))
    throw ArgumentError("problem: epsilon must be a finite non-negative number");
  if (!prob.x0) return;
  check_shape(prob, *prob.x0, "problem ground truth");
  Vector r = apply_op(prob.op, *prob.x0) - prob.y;
  if (prob.z) {
    if (prob.z->size() != prob.op.m()) throw ArgumentError("problem: noise length must equal m");
    r += *prob.z;
    if (l2(*prob.z) > prob.epsilon * (1.0 + 1e-12))
      throw ArgumentError("problem: planted noise exceeds epsilon");
  }
  if (l2(r) > 1e-10 * std::max(1.0, l2(prob.y)))
    throw ArgumentError("problem: measurements do not match the planted signal");
}

double recovery_norm(const RecoveryProblem& prob, const Matrix& x) {
  return prob.is_matrix() ? nuclear(x) : l1(x.vec());
}

double residual_norm(const RecoveryProblem& prob, const Matrix& x) {
  return l2(apply_op(prob.op, x) - prob.y);
}

bool is_as_good_as(const Matrix& candidate, const RecoveryProblem& prob) {
  if (!prob.x0) throw ArgumentError("is_as_good_as: the problem has no ground truth");
  check_shape(prob, candidate, "is_as_good_as");
  const double tol = 1e-9;
  const double planted = recovery_norm(prob, *prob.x0);
  return residual_norm(prob, candidate) <= prob.epsilon + tol * std::max(1.0, l2(prob.y)) &&
         recovery_norm(prob, candidate) <= planted + tol * std::max(1.0, planted);
}

}  // namespace rankrec
