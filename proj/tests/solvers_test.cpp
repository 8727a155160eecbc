#include <gtest/gtest.h>

#include <cmath>

#include "rankrec/conditions.hpp"
#include "rankrec/lp.hpp"
#include "rankrec/random.hpp"
#include "rankrec/solvers.hpp"

using namespace rankrec;

namespace {

Matrix column(const Vector& v) { return Matrix::from_column(v); }

// min ||x||_1 s.t. A x = y as an LP in (x+, x-) >= 0 with A x = y split into
// two inequalities; returns the minimizer.
Vector l1_by_simplex(const Matrix& a, const Vector& y) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix lp(2 * m, 2 * n);
  Vector b(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      lp(i, j) = a(i, j);
      lp(i, n + j) = -a(i, j);
      lp(m + i, j) = -a(i, j);
      lp(m + i, n + j) = a(i, j);
    }
    b[i] = y[i];
    b[m + i] = -y[i];
  }
  const LpResult r = solve_lp(lp, b, Vector(2 * n, -1.0));
  EXPECT_EQ(r.status, LpStatus::Optimal);
  Vector x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = r.x[j] - r.x[n + j];
  return x;
}

// Operator on n x n matrices that only sees the diagonal: A(X) = B diag(X).
MeasurementOperator diagonal_operator(const Matrix& b) {
  const std::size_t n = b.cols();
  Matrix coeff(b.rows(), n * n);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) coeff(i, j * n + j) = b(i, j);
  return MeasurementOperator::matrix_map(coeff, n, n);
}

double prox_objective(const Matrix& z, const Matrix& x, double tau) {
  const Matrix d = z - x;
  return tau * nuclear(z) + 0.5 * frobenius_inner(d, d);
}

}  // namespace

TEST(SolverConfigTest, RejectsOutOfRangeFields) {
  SolverConfig c;
  EXPECT_NO_THROW(validate(c));
  c.gamma_decay = 1.0;
  EXPECT_THROW(validate(c), ArgumentError);
  c = {};
  c.rho = 0.0;
  EXPECT_THROW(validate(c), ArgumentError);
  c = {};
  c.p = 1.2;
  EXPECT_THROW(validate(c), ArgumentError);
}

TEST(Problem, PlantRecordsGroundTruth) {
  Rng rng(1);
  const auto op = MeasurementOperator::vector_map(rng.gaussian_matrix(3, 5));
  const Vector x0{1, 0, 0, -2, 0};
  const auto prob = plant(op, column(x0), 0.5, Vector{0.1, 0.2, -0.1});
  EXPECT_LT(l2(op.apply(x0) + *prob.z - prob.y), 1e-12);
  EXPECT_THROW(plant(op, column(x0), 0.1, Vector{0.1, 0.2, -0.1}), ArgumentError);
}

TEST(SolveL1, IdentityRecoversExactly) {
  const Vector x0{0.5, -1.0, 0.0, 2.0};
  const auto sol = solve_l1(plant(MeasurementOperator::vector_map(Matrix::identity(4)), column(x0)));
  EXPECT_TRUE(sol.converged);
  EXPECT_LT(l2(sol.vector() - x0), 1e-8);
}

TEST(SolveL1, ZeroMeasurementsGiveZero) {
  Rng rng(2);
  const auto op = MeasurementOperator::vector_map(rng.gaussian_matrix(4, 9));
  for (double eps : {0.0, 0.3}) {
    RecoveryProblem prob;
    prob.op = op;
    prob.y = Vector(4);
    prob.epsilon = eps;
    const auto sol = solve_l1(prob);
    EXPECT_LT(l2(sol.vector()), 1e-12);
    EXPECT_NEAR(sol.objective, 0.0, 1e-12);
  }
}

TEST(SolveL1, GaussianSparseRecoveryAgreesWithNullspaceMarginAndSimplex) {
  Rng rng(20);
  const Matrix a = rng.gaussian_matrix(20, 40);
  const auto op = MeasurementOperator::vector_map(a);
  const double margin = nsp_margin_vector(NullspaceBasis::of(op), 3).value;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x0 = rng.sparse_vector(40, 3);
    const auto prob = plant(op, column(x0));
    const auto sol = solve_l1(prob);
    const Vector lp = l1_by_simplex(a, prob.y);
    EXPECT_NEAR(sol.objective, l1(lp), 1e-6 * std::max(1.0, l1(lp)));
    if (margin < 0.0) {
      EXPECT_LT(l2(sol.vector() - x0), 1e-6 * l2(x0));
    }
    EXPECT_TRUE(is_as_good_as(sol.estimate, prob));
  }
}

TEST(SolveL1, MatchesSimplexWhenRecoveryFails) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = rng.gaussian_matrix(4, 12);
    const auto prob = plant(MeasurementOperator::vector_map(a), column(rng.sparse_vector(12, 4)));
    const auto sol = solve_l1(prob);
    EXPECT_TRUE(sol.converged);
    EXPECT_LT(sol.residual, 1e-8);
    EXPECT_NEAR(sol.objective, l1(l1_by_simplex(a, prob.y)), 1e-6);
  }
}

TEST(SolveL1, NoisyProblemIsFeasibleAndStationary) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = rng.gaussian_matrix(10, 20);
    const Vector z = 0.05 * rng.unit_vector(10);
    const auto prob =
        plant(MeasurementOperator::vector_map(a), column(rng.sparse_vector(20, 2)), 0.05, z);
    const auto sol = solve_l1(prob);
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.residual, prob.epsilon + 1e-6);
    EXPECT_TRUE(is_as_good_as(sol.estimate, prob));
    // KKT: A^T (y - A x) is a positive multiple of a subgradient of ||x||_1.
    const Vector x = sol.vector();
    const Vector g = transpose_times(a, prob.y - a * x);
    double scale = 0.0;
    for (double v : g) scale = std::max(scale, std::abs(v));
    ASSERT_GT(scale, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) > 1e-6) {
        EXPECT_NEAR(g[i] / scale, x[i] > 0 ? 1.0 : -1.0, 1e-4);
      } else {
        EXPECT_LE(std::abs(g[i]) / scale, 1.0 + 1e-6);
      }
    }
  }
}

TEST(SolveL1, InfeasibleBoundReportsMinimumResidual) {
  RecoveryProblem prob;
  prob.op = MeasurementOperator::vector_map(Matrix{{1, 0}, {1, 0}});
  prob.y = Vector{1, -1};
  prob.epsilon = 0.1;
  try {
    solve_l1(prob);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NEAR(e.residual, std::sqrt(2.0), 1e-12);
  }
}

TEST(SolveL1, RejectsMatrixMaps) {
  const auto prob = plant(MeasurementOperator::vectorization_identity(2, 2), Matrix(2, 2));
  EXPECT_THROW(solve_l1(prob), ArgumentError);
}

TEST(Svt, DiagonalCase) {
  const Matrix out = svt(Matrix::diagonal(Vector{3, 1}), 1.0);
  EXPECT_NEAR(frobenius(out - Matrix::diagonal(Vector{2, 0})), 0.0, 1e-14);
}

TEST(Svt, ZeroThresholdIsIdentity) {
  Rng rng(4);
  const Matrix x = rng.gaussian_matrix(3, 5);
  EXPECT_EQ(svt(x, 0.0), x);
  EXPECT_THROW(svt(x, -1.0), ArgumentError);
}

TEST(Svt, BeatsRandomPerturbationProbes) {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = rng.gaussian_matrix(4, 6);
    const double tau = rng.uniform(0.1, 2.0);
    const Matrix z = svt(x, tau);
    const double best = prox_objective(z, x, tau);
    for (int probe = 0; probe < 2000; ++probe) {
      Matrix d = rng.gaussian_matrix(4, 6);
      d *= std::pow(10.0, rng.uniform(-6.0, 0.0));
      EXPECT_GE(prox_objective(z + d, x, tau), best - 1e-12);
    }
  }
}

TEST(SolveNuclear, IdentityRecoversExactly) {
  Rng rng(6);
  const Matrix x0 = rng.gaussian_matrix(3, 4);
  const auto sol = solve_nuclear(plant(MeasurementOperator::vectorization_identity(3, 4), x0));
  EXPECT_TRUE(sol.converged);
  EXPECT_LT(frobenius(sol.estimate - x0), 1e-8);
}

TEST(SolveNuclear, DiagonalOperatorReducesToL1) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix b = rng.gaussian_matrix(3, 5);
    const Vector d0 = rng.sparse_vector(5, 2);
    const auto mprob = plant(diagonal_operator(b), Matrix::diagonal(d0));
    const auto vprob = plant(MeasurementOperator::vector_map(b), column(d0));
    const auto ms = solve_nuclear(mprob);
    const auto vs = solve_l1(vprob);
    EXPECT_LT(l2(ms.estimate.diag() - vs.vector()), 1e-6) << "trial " << trial;
    EXPECT_NEAR(ms.objective, vs.objective, 1e-6);
  }
}

TEST(SolveNuclear, NoisyProblemIsFeasible) {
  Rng rng(8);
  const auto op = MeasurementOperator::matrix_map(rng.gaussian_matrix(12, 16), 4, 4);
  const Matrix x0 = column(rng.gaussian_vector(4)) * column(rng.gaussian_vector(4)).transpose();
  const auto prob = plant(op, x0, 0.1, 0.1 * rng.unit_vector(12));
  const auto sol = solve_nuclear(prob);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(sol.residual, prob.epsilon + 1e-6);
  EXPECT_TRUE(is_as_good_as(sol.estimate, prob));
  EXPECT_NEAR(sol.objective, nuclear(sol.estimate), 1e-9);
}

TEST(SolveNuclear, RankOneRecoveryConsistentWithSampledMargin) {
  // Not a theorem at this size: mismatches are reported, not asserted.
  int agree = 0;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    const auto op = MeasurementOperator::matrix_map(rng.gaussian_matrix(14, 16), 4, 4);
    const Matrix x0 = column(rng.gaussian_vector(4)) * column(rng.gaussian_vector(4)).transpose();
    const auto prob = plant(op, x0);
    const auto sol = solve_nuclear(prob);
    EXPECT_LT(sol.residual, 1e-8 * std::max(1.0, l2(prob.y)));
    if (nsp_margin_matrix_sampled(op, 1, 100, seed).value < 0.0) {
      ++checked;
      agree += frobenius(sol.estimate - x0) < 1e-5 * frobenius(x0);
    }
  }
  RecordProperty("no_violation_seeds", checked);
  RecordProperty("recovered_on_those", agree);
}

TEST(IrlsLp, IdentityWithPOneRecoversExactly) {
  SolverConfig cfg;
  cfg.p = 1.0;
  const Vector x0{1.0, 0.0, -3.0};
  const auto sol =
      solve_irls_lp(plant(MeasurementOperator::vector_map(Matrix::identity(3)), column(x0)), cfg);
  EXPECT_LT(l2(sol.vector() - x0), 1e-12);
}

TEST(IrlsLp, ZeroMeasurementsStopAfterOneIteration) {
  Rng rng(9);
  RecoveryProblem prob;
  prob.op = MeasurementOperator::vector_map(rng.gaussian_matrix(3, 6));
  prob.y = Vector(3);
  const auto sol = solve_irls_lp(prob);
  EXPECT_EQ(sol.iterations, 1u);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(l2(sol.vector()), 0.0);
}

TEST(IrlsLp, RejectsNoisyPrograms) {
  const auto prob = plant(MeasurementOperator::vector_map(Matrix::identity(2)), column(Vector{1, 0}), 0.1);
  EXPECT_THROW(solve_irls_lp(prob), ArgumentError);
}

TEST(IrlsLp, SmoothedObjectiveNeverIncreases) {
  Rng rng(10);
  SolverConfig cfg;
  cfg.p = 0.5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto prob = plant(MeasurementOperator::vector_map(rng.gaussian_matrix(8, 20)),
                            column(rng.sparse_vector(20, 3)));
    const auto sol = solve_irls_lp(prob, cfg);
    for (const auto& h : sol.history)
      EXPECT_LE(h.smoothed_after, h.smoothed_before + 1e-10 * std::max(1.0, h.smoothed_before));
  }
}

TEST(IrlsLp, HalfNormBeatsL1OnMostSeeds) {
  SolverConfig cfg;
  cfg.p = 0.5;
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto prob = plant(MeasurementOperator::vector_map(rng.gaussian_matrix(8, 20)),
                            column(rng.sparse_vector(20, 2)));
    const auto irls = solve_irls_lp(prob, cfg);
    const auto bp = solve_l1(prob);
    wins += irls.objective <= lp_p(bp.vector(), 0.5) + 1e-9;
  }
  EXPECT_GE(wins, 80);
}

TEST(IrlsSchatten, IdentityWithPOneRecoversExactly) {
  Rng rng(11);
  const Matrix x0 = rng.gaussian_matrix(3, 3);
  const auto sol = solve_irls_schatten_p(plant(MeasurementOperator::vectorization_identity(3, 3), x0));
  EXPECT_LT(frobenius(sol.estimate - x0), 1e-10);
}

TEST(IrlsSchatten, DiagonalOperatorTracksVectorIrlsPerIteration) {
  Rng rng(12);
  const Matrix b = rng.gaussian_matrix(3, 5);
  const Vector d0 = rng.sparse_vector(5, 1);
  const auto mprob = plant(diagonal_operator(b), Matrix::diagonal(d0));
  const auto vprob = plant(MeasurementOperator::vector_map(b), column(d0));
  SolverConfig cfg;
  cfg.p = 0.5;
  cfg.polish = false;
  for (std::size_t iters = 1; iters <= 30; ++iters) {
    cfg.max_iterations = iters;
    const auto ms = solve_irls_schatten_p(mprob, cfg);
    const auto vs = solve_irls_lp(vprob, cfg);
    EXPECT_LT(l2(ms.estimate.diag() - vs.vector()), 1e-8) << "iteration " << iters;
    EXPECT_EQ(ms.history.back().gamma, vs.history.back().gamma);
  }
}

TEST(IrlsSchatten, SmoothedObjectiveNeverIncreases) {
  Rng rng(13);
  SolverConfig cfg;
  cfg.p = 0.5;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x0 = column(rng.gaussian_vector(4)) * column(rng.gaussian_vector(4)).transpose();
    const auto sol = solve_irls_schatten_p(
        plant(MeasurementOperator::matrix_map(rng.gaussian_matrix(10, 16), 4, 4), x0), cfg);
    for (const auto& h : sol.history)
      EXPECT_LE(h.smoothed_after, h.smoothed_before + 1e-10 * std::max(1.0, h.smoothed_before));
    EXPECT_NEAR(sol.objective, schatten_p(sol.estimate, 0.5), 1e-9);
  }
}

TEST(AsGoodAs, Examples) {
  Rng rng(14);
  const auto op = MeasurementOperator::vector_map(rng.gaussian_matrix(5, 8));
  const auto prob = plant(op, column(rng.sparse_vector(8, 2)), 0.1, 0.1 * rng.unit_vector(5));
  EXPECT_TRUE(is_as_good_as(*prob.x0, prob));
  // ||A d|| = 3 epsilon puts the residual at least 2 epsilon, twice the bound.
  const Vector d = (0.3 / l2(op.apply(Vector(8, 1.0)))) * Vector(8, 1.0);
  const Matrix far = column(prob.x0->vec() + d);
  EXPECT_GE(residual_norm(prob, far), 0.2 - 1e-12);
  EXPECT_FALSE(is_as_good_as(far, prob));
  EXPECT_TRUE(is_as_good_as(solve_l1(prob).estimate, prob));
  RecoveryProblem bare = prob;
  bare.x0.reset();
  EXPECT_THROW(is_as_good_as(*prob.x0, bare), ArgumentError);
}
