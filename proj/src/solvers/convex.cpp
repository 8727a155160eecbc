#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "rankrec/solvers.hpp"
#include "refit.hpp"

namespace rankrec {

Vector soft_threshold(const Vector& x, double tau) {
  if (tau < 0.0) throw ArgumentError("soft_threshold: tau must be non-negative");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]) - tau;
    out[i] = a > 0.0 ? std::copysign(a, x[i]) : 0.0;
  }
  return out;
}

Matrix svt(const Matrix& x, double tau) {
  if (tau < 0.0) throw ArgumentError("svt: tau must be non-negative");
  if (tau == 0.0) return x;
  const SvdResult s = svd(x);
  Matrix out(x.rows(), x.cols());
  for (std::size_t t = 0; t < s.sigma.size(); ++t) {
    const double shrunk = s.sigma[t] - tau;
    if (shrunk <= 0.0) break;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double ui = shrunk * s.U(i, t);
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += ui * s.V(j, t);
    }
  }
  return out;
}

namespace {

// Euclidean projection onto {x : ||A x - y|| <= eps}, through the thin SVD
// A = sum s_i u_i v_i^T. Along v_i the projection of v is
// (b_i + mu s_i yh_i) / (1 + mu s_i^2) with b = V^T v, yh = U^T y, and the
// multiplier mu solves ||A x(mu) - y|| = eps.
class ResidualBall {
 public:
  ResidualBall(const Matrix& a, const Vector& y, double eps) : eps_(eps) {
    const SvdResult s = svd(a);
    rank_ = numerical_rank(s.sigma);
    v_ = s.V.block(0, 0, s.V.rows(), rank_);
    sigma_ = Vector(rank_);
    yh_ = Vector(rank_);
    Vector fit(y.size());
    for (std::size_t i = 0; i < rank_; ++i) {
      sigma_[i] = s.sigma[i];
      double c = 0.0;
      for (std::size_t r = 0; r < y.size(); ++r) c += s.U(r, i) * y[r];
      yh_[i] = c;
      for (std::size_t r = 0; r < y.size(); ++r) fit[r] += c * s.U(r, i);
    }
    out_of_range_ = l2(y - fit);
    const double slack = 1e-9 * std::max(1.0, l2(y));
    if (out_of_range_ > eps_ + slack)
      throw InfeasibleError("no point satisfies the residual bound; minimum residual is " +
                                std::to_string(out_of_range_),
                            out_of_range_);
    // At the boundary only the least-squares set remains.
    affine_ = eps_ <= out_of_range_ + slack;
  }

  Vector project(const Vector& v) const {
    Vector b(rank_);
    for (std::size_t i = 0; i < rank_; ++i) {
      double c = 0.0;
      for (std::size_t r = 0; r < v.size(); ++r) c += v_(r, i) * v[r];
      b[i] = c;
    }
    Vector target(rank_);
    if (affine_) {
      for (std::size_t i = 0; i < rank_; ++i) target[i] = yh_[i] / sigma_[i];
    } else {
      const double r0 = residual2(b, 0.0);
      if (r0 <= eps_ * eps_) return v;
      auto g = [&](double mu) { return residual2(b, mu) - eps_ * eps_; };
      double hi = 1.0 / (sigma_[0] * sigma_[0]);
      while (g(hi) > 0.0 && hi < 1e300) hi *= 4.0;
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(
          g, 0.0, hi, r0 - eps_ * eps_, g(hi), boost::math::tools::eps_tolerance<double>(52), iters);
      // The upper end is the feasible side.
      const double mu = root.second;
      for (std::size_t i = 0; i < rank_; ++i)
        target[i] = (b[i] + mu * sigma_[i] * yh_[i]) / (1.0 + mu * sigma_[i] * sigma_[i]);
    }
    Vector x = v;
    for (std::size_t i = 0; i < rank_; ++i) {
      const double d = target[i] - b[i];
      if (d == 0.0) continue;
      for (std::size_t r = 0; r < x.size(); ++r) x[r] += d * v_(r, i);
    }
    return x;
  }

 private:
  double residual2(const Vector& b, double mu) const {
    double s = out_of_range_ * out_of_range_;
    for (std::size_t i = 0; i < rank_; ++i) {
      const double e = (sigma_[i] * b[i] - yh_[i]) / (1.0 + mu * sigma_[i] * sigma_[i]);
      s += e * e;
    }
    return s;
  }

  double eps_;
  std::size_t rank_ = 0;
  Matrix v_;
  Vector sigma_, yh_;
  double out_of_range_ = 0.0;
  bool affine_ = false;
};

struct ConvexProgram {
  std::function<Vector(const Vector&, double)> prox;
  std::function<double(const Vector&)> norm;
  /// Least-squares refit on the structure (support or singular subspaces) of
  /// a prox output.
  std::function<Vector(const Vector&)> refit;
};

RecoverySolution admm(const RecoveryProblem& prob, const SolverConfig& cfg,
                      const ConvexProgram& prog) {
  validate(prob);
  validate(cfg);
  const std::size_t n = prob.op.n();
  const Matrix& a = prob.op.coefficients();
  const ResidualBall ball(a, prob.y, prob.epsilon);
  const double y_scale = std::max(1.0, l2(prob.y));
  const double feas_tol = 1e-9 * y_scale;
  constexpr double kRelax = 1.6;

  auto to_estimate = [&](const Vector& v) {
    return prob.is_matrix() ? Matrix::unvec(v, prob.op.n1(), prob.op.n2()) : Matrix::from_column(v);
  };
  auto finish = [&](RecoverySolution& sol, const Vector& x) {
    sol.estimate = to_estimate(x);
    sol.objective = prog.norm(x);
    sol.residual = l2(a * x - prob.y);
  };

  RecoverySolution sol;
  double rho = cfg.rho;
  constexpr std::size_t kMaxRhoChanges = 40;
  std::size_t rho_changes = 0;
  Vector z(n), u(n);
  Vector x = ball.project(z);
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    x = ball.project(z - u);
    const Vector z_old = z;
    const Vector xh = kRelax * x + (1.0 - kRelax) * z_old;
    z = prog.prox(xh + u, 1.0 / rho);
    u += xh - z;

    const double r = l2(x - z);
    const double s = rho * l2(z - z_old);
    const double eps_pri = cfg.primal_tolerance * std::max({1.0, l2(x), l2(z)});
    const double eps_dual = cfg.dual_tolerance * std::max(1.0, rho * l2(u));
    sol.iterations = it;
    const bool done = r <= eps_pri && s <= eps_dual;
    if (it % cfg.history_stride == 0 || done || it == cfg.max_iterations)
      sol.history.push_back({it, prog.norm(x), r, s, 0.0, 0.0, 0.0});

    // Refit periodically near convergence and once more on the converged iterate.
    const bool near = r <= 1e-6 * std::max(1.0, l2(x)) && s <= 1e-6 * std::max(1.0, rho * l2(u));
    if (cfg.polish && prob.epsilon == 0.0 && (done || (it % 25 == 0 && near))) {
      const Vector cand = prog.refit(z);
      if (l2(a * cand - prob.y) <= feas_tol &&
          prog.norm(cand) <= prog.norm(x) + 1e-12 * std::max(1.0, prog.norm(x))) {
        x = cand;
        sol.converged = true;
        sol.polished = true;
        break;
      }
    }

    if (done) {
      sol.converged = true;
      break;
    }

    // Residual balancing keeps the primal and dual residuals comparable. It
    // is switched off after a fixed number of changes so that the fixed-rho
    // convergence guarantee applies to the tail of the run.
    if (it % 10 == 0 && rho_changes < kMaxRhoChanges) {
      if (r > 10.0 * s) {
        rho *= 2.0;
        u *= 0.5;
        ++rho_changes;
      } else if (s > 10.0 * r) {
        rho *= 0.5;
        u *= 2.0;
        ++rho_changes;
      }
    }
  }
  finish(sol, x);
  return sol;
}

}  // namespace

RecoverySolution solve_l1(const RecoveryProblem& prob, const SolverConfig& cfg) {
  if (prob.is_matrix()) throw ArgumentError("solve_l1: expected a vector map");
  const Matrix& a = prob.op.coefficients();
  ConvexProgram prog;
  prog.prox = soft_threshold;
  prog.norm = [](const Vector& v) { return l1(v); };
  prog.refit = [&](const Vector& z) { return detail::support_refit(a, prob.y, z, 0.0); };
  return admm(prob, cfg, prog);
}

RecoverySolution solve_nuclear(const RecoveryProblem& prob, const SolverConfig& cfg) {
  if (!prob.is_matrix()) throw ArgumentError("solve_nuclear: expected a matrix map");
  const std::size_t n1 = prob.op.n1();
  const std::size_t n2 = prob.op.n2();
  ConvexProgram prog;
  prog.prox = [n1, n2](const Vector& v, double tau) {
    return svt(Matrix::unvec(v, n1, n2), tau).vec();
  };
  prog.norm = [n1, n2](const Vector& v) { return nuclear(Matrix::unvec(v, n1, n2)); };
  prog.refit = [&](const Vector& z) {
    return detail::subspace_refit(prob.op, prob.y, z, tolerances().rank_relative);
  };
  return admm(prob, cfg, prog);
}

}  // namespace rankrec
