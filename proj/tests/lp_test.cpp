#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "rankrec/lp.hpp"
#include "rankrec/random.hpp"

using namespace rankrec;

namespace {

// Brute force: every vertex of {Ax <= b, x >= 0} is the solution of n tight
// constraints drawn from the m + n inequalities. Returns the best feasible
// objective, or nullopt when no vertex is feasible.
std::optional<double> vertex_enumeration(const Matrix& a, const Vector& b, const Vector& c) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix rows(m + n, n);
  Vector rhs(m + n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) rows(i, j) = a(i, j);
    rhs[i] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) rows(m + j, j) = -1.0;

  std::optional<double> best;
  const std::size_t total = m + n;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n) continue;
    Matrix sys(n, n);
    Vector r(n);
    std::size_t t = 0;
    for (std::size_t i = 0; i < total; ++i) {
      if (!((mask >> i) & 1u)) continue;
      for (std::size_t j = 0; j < n; ++j) sys(t, j) = rows(i, j);
      r[t++] = rhs[i];
    }
    if (singular_values(sys)[n - 1] < 1e-9) continue;
    const Vector x = pinv(sys) * r;
    bool feasible = true;
    for (std::size_t i = 0; i < total && feasible; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += rows(i, j) * x[j];
      feasible = s <= rhs[i] + 1e-9;
    }
    if (!feasible) continue;
    const double v = dot(c, x);
    if (!best || v > *best) best = v;
  }
  return best;
}

}  // namespace

TEST(Simplex, SmallTextbookProblem) {
  // max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
  const Matrix a{{1, 0}, {0, 2}, {3, 2}};
  const LpResult r = solve_lp(a, Vector{4, 12, 18}, Vector{3, 5});
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 36.0, 1e-12);
  EXPECT_NEAR(r.x[0], 2.0, 1e-12);
  EXPECT_NEAR(r.x[1], 6.0, 1e-12);
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // max -x - y; x + y >= 2 -> -2.
  const Matrix a{{-1, -1}};
  const LpResult r = solve_lp(a, Vector{-2}, Vector{-1, -1});
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -2.0, 1e-12);
}

TEST(Simplex, DetectsInfeasibility) {
  const Matrix a{{1, 1}, {-1, -1}};
  EXPECT_EQ(solve_lp(a, Vector{1, -3}, Vector{1, 1}).status, LpStatus::Infeasible);
}

TEST(Simplex, DetectsUnboundedness) {
  const Matrix a{{1, -1}};
  EXPECT_EQ(solve_lp(a, Vector{1}, Vector{0, 1}).status, LpStatus::Unbounded);
}

TEST(Simplex, BealeCyclingExampleTerminates) {
  // Cycles under the largest-coefficient rule; Bland's rule must finish.
  const Matrix a{{0.5, -5.5, -2.5, 9}, {0.5, -1.5, -0.5, 1}, {1, 0, 0, 0}};
  const LpResult r = solve_lp(a, Vector{0, 0, 1}, Vector{10, -57, -9, -24});
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
}

TEST(Simplex, PivotCapRaises) {
  const Matrix a{{1, 0}, {0, 2}, {3, 2}};
  EXPECT_THROW(solve_lp(a, Vector{4, 12, 18}, Vector{3, 5}, 1), NumericalError);
}

TEST(Simplex, RejectsMismatchedShapes) {
  EXPECT_THROW(solve_lp(Matrix(2, 2), Vector(3), Vector(2)), ArgumentError);
}

TEST(Simplex, MatchesVertexEnumerationOnRandomBoundedProblems) {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.index(1, 4);
    const std::size_t m = rng.index(1, 5);
    Matrix a = rng.gaussian_matrix(m + 1, n);
    Vector b(m + 1);
    for (std::size_t i = 0; i < m; ++i) b[i] = rng.uniform(-1.0, 2.0);
    // A box row keeps the feasible set bounded.
    for (std::size_t j = 0; j < n; ++j) a(m, j) = 1.0;
    b[m] = 5.0;
    const Vector c = rng.gaussian_vector(n);
    const LpResult r = solve_lp(a, b, c);
    const auto oracle = vertex_enumeration(a, b, c);
    if (!oracle) {
      EXPECT_EQ(r.status, LpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(r.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, *oracle, 1e-8) << "trial " << trial;
    EXPECT_NEAR(dot(c, r.x), r.objective, 1e-8);
    const Vector ax = a * r.x;
    for (std::size_t i = 0; i < a.rows(); ++i) EXPECT_LE(ax[i], b[i] + 1e-9);
    for (double v : r.x) EXPECT_GE(v, -1e-12);
  }
}
