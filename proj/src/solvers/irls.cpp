#include <cmath>
#include <functional>

#include "rankrec/solvers.hpp"
#include "refit.hpp"

namespace rankrec {

namespace {

struct Reweighting {
  /// Scaling H with x_next = H (A H)^+ y, i.e. H^2 is the inverse weight.
  std::function<Matrix(const Vector& x, double gamma)> scaling;
  /// Smoothed objective whose level sets the weights majorize.
  std::function<double(const Vector& x, double gamma)> smoothed;
  std::function<double(const Vector& x)> objective;
  std::function<Vector(const Vector& x, double rel)> refit;
};

// Entries (or singular values) this far below the largest are treated as
// smoothing residue by the final refit.
constexpr double kRefitThreshold = 1e-6;

RecoverySolution irls(const RecoveryProblem& prob, const SolverConfig& cfg,
                      const Reweighting& rw) {
  validate(prob);
  validate(cfg);
  if (prob.epsilon != 0.0) throw ArgumentError("IRLS solves the equality-constrained program only");
  const Matrix& a = prob.op.coefficients();
  const double y_scale = std::max(1.0, l2(prob.y));

  auto to_estimate = [&](const Vector& v) {
    return prob.is_matrix() ? Matrix::unvec(v, prob.op.n1(), prob.op.n2()) : Matrix::from_column(v);
  };

  RecoverySolution sol;
  Vector x = min_norm_solve(a, prob.y);
  const double start_residual = l2(a * x - prob.y);
  if (start_residual > 1e-9 * y_scale)
    throw InfeasibleError("measurements are outside the range of the operator", start_residual);

  double gamma = cfg.gamma0;
  if (l2(x) == 0.0) {
    sol.iterations = 1;
    sol.converged = true;
  }
  for (std::size_t it = 1; !sol.converged && it <= cfg.max_iterations; ++it) {
    const Matrix h = rw.scaling(x, gamma);
    const Vector next = h * min_norm_solve(a * h, prob.y);
    if (!next.all_finite() || l2(a * next - prob.y) > 1e-8 * y_scale)
      throw NumericalError("IRLS: weighted least-squares system is singular");
    IterationRecord rec;
    rec.iteration = it;
    rec.gamma = gamma;
    rec.smoothed_before = rw.smoothed(x, gamma);
    rec.smoothed_after = rw.smoothed(next, gamma);
    const double step = l2(next - x);
    x = next;
    rec.objective = rw.objective(x);
    rec.primal_residual = step;
    sol.history.push_back(rec);
    sol.iterations = it;

    if (step < cfg.primal_tolerance * std::max(1.0, l2(x)) && gamma <= cfg.gamma_min) {
      sol.converged = true;
      break;
    }
    if (step < std::sqrt(gamma) / 100.0) gamma = std::max(gamma * cfg.gamma_decay, cfg.gamma_min);
  }
  if (cfg.polish && l2(x) > 0.0) {
    const Vector cand = rw.refit(x, kRefitThreshold);
    if (l2(a * cand - prob.y) <= 1e-9 * y_scale && rw.objective(cand) < rw.objective(x)) {
      x = cand;
      sol.polished = true;
    }
  }
  sol.estimate = to_estimate(x);
  sol.objective = rw.objective(x);
  sol.residual = l2(a * x - prob.y);
  return sol;
}

}  // namespace

RecoverySolution solve_irls_lp(const RecoveryProblem& prob, const SolverConfig& cfg) {
  if (prob.is_matrix()) throw ArgumentError("solve_irls_lp: expected a vector map");
  const double p = cfg.p;
  Reweighting rw;
  rw.scaling = [p](const Vector& x, double gamma) {
    Vector h(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      h[i] = std::pow(x[i] * x[i] + gamma, (1.0 - p / 2.0) / 2.0);
    return Matrix::diagonal(h);
  };
  rw.smoothed = [p](const Vector& x, double gamma) {
    double s = 0.0;
    for (double v : x) s += std::pow(v * v + gamma, p / 2.0);
    return s;
  };
  rw.objective = [p](const Vector& x) { return lp_p(x, p); };
  rw.refit = [&prob](const Vector& x, double rel) {
    return detail::support_refit(prob.op.coefficients(), prob.y, x, rel);
  };
  return irls(prob, cfg, rw);
}

RecoverySolution solve_irls_schatten_p(const RecoveryProblem& prob, const SolverConfig& cfg) {
  if (!prob.is_matrix()) throw ArgumentError("solve_irls_schatten_p: expected a matrix map");
  const double p = cfg.p;
  const std::size_t n1 = prob.op.n1();
  const std::size_t n2 = prob.op.n2();
  Reweighting rw;
  // W^{-1/2} = (X X^T + gamma I)^{(1 - p/2)/2} acts on the row index of the
  // row-major vectorization, so H = W^{-1/2} (x) I_{n2}.
  rw.scaling = [=](const Vector& x, double gamma) {
    const Matrix xm = Matrix::unvec(x, n1, n2);
    Matrix gram = xm * xm.transpose();
    for (std::size_t i = 0; i < n1; ++i) gram(i, i) += gamma;
    const SvdResult e = svd(gram);
    Matrix root(n1, n1);
    for (std::size_t t = 0; t < n1; ++t) {
      const double f = std::pow(e.sigma[t], (1.0 - p / 2.0) / 2.0);
      for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t k = 0; k < n1; ++k) root(i, k) += f * e.U(i, t) * e.U(k, t);
    }
    Matrix h(n1 * n2, n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t k = 0; k < n1; ++k)
        for (std::size_t j = 0; j < n2; ++j) h(i * n2 + j, k * n2 + j) = root(i, k);
    return h;
  };
  rw.smoothed = [=](const Vector& x, double gamma) {
    const Vector s = singular_values(Matrix::unvec(x, n1, n2));
    double total = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      const double si = i < s.size() ? s[i] : 0.0;
      total += std::pow(si * si + gamma, p / 2.0);
    }
    return total;
  };
  rw.objective = [=](const Vector& x) { return schatten_p(Matrix::unvec(x, n1, n2), p); };
  rw.refit = [&prob](const Vector& x, double rel) {
    return detail::subspace_refit(prob.op, prob.y, x, rel);
  };
  return irls(prob, cfg, rw);
}

}  // namespace rankrec
