#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rankrec/conditions.hpp"
#include "rankrec/random.hpp"

using namespace rankrec;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix dct_rows(std::size_t m, std::size_t n) {
  Matrix a(m, n);
  const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double ci = i == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      a(i, j) = scale * ci * std::cos(kPi * (2.0 * j + 1.0) * i / (2.0 * n));
    }
  return a;
}

// max over unit 2-sparse x of | ||Ax||^2 - 1 | on an angular grid per pair.
double ric2_grid(const Matrix& a) {
  const std::size_t n = a.cols();
  double best = 0.0;
  const int steps = 20000;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (int t = 0; t < steps; ++t) {
        const double th = kPi * t / steps;
        Vector x(n);
        x[i] = std::cos(th);
        x[j] = std::sin(th);
        const Vector ax = a * x;
        best = std::max(best, std::abs(dot(ax, ax) - 1.0));
      }
  return best;
}

Vector on_circle(const Matrix& basis, double th) {
  return std::cos(th) * basis.col(0) + std::sin(th) * basis.col(1);
}

// Derivative-free compass search on theta from many starts; f is minimized.
template <class F>
double multistart_minimize(F f, int starts) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    double th = kPi * s / starts;
    double v = f(th);
    double step = kPi / starts;
    while (step > 1e-13) {
      const double lo = f(th - step);
      const double hi = f(th + step);
      if (lo < v && lo <= hi) {
        th -= step;
        v = lo;
      } else if (hi < v) {
        th += step;
        v = hi;
      } else {
        step *= 0.5;
      }
    }
    best = std::min(best, v);
  }
  return best;
}

double ssp_ratio(const Vector& w) { return std::pow(l1(w) / l2(w), 2); }

double nsp_ratio(const Vector& w, std::size_t k) {
  const double total = l1(w);
  return (2.0 * l1(top_k_vector(w, k)) - total) / total;
}

MeasurementOperator gaussian_matrix_map(Rng& rng, std::size_t m, std::size_t n1, std::size_t n2) {
  Matrix a = rng.gaussian_matrix(m, n1 * n2);
  a *= 1.0 / std::sqrt(static_cast<double>(m));
  return MeasurementOperator::matrix_map(std::move(a), n1, n2);
}

// Operator whose kernel is exactly span{w}, with w given as an n1 x n2 matrix.
MeasurementOperator operator_with_kernel(const Matrix& w) {
  const Vector v = (1.0 / frobenius(w)) * w.vec();
  return MeasurementOperator::matrix_map(orthogonal_complement(Matrix::from_column(v)).transpose(),
                                         w.rows(), w.cols());
}

}  // namespace

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(20, 10), 184756u);
  EXPECT_EQ(binomial(3, 4), 0u);
  EXPECT_EQ(binomial(7, 0), 1u);
}

TEST(ConditionKind, StringRoundTrip) {
  for (auto k : {ConditionKind::RIC, ConditionKind::ROC, ConditionKind::SSP,
                 ConditionKind::NspVector, ConditionKind::NspMatrix, ConditionKind::NspSchattenP})
    EXPECT_EQ(condition_kind_from_string(to_string(k)), k);
  EXPECT_THROW(condition_kind_from_string("RIP"), ArgumentError);
}

TEST(NullspaceBasisTest, OrthonormalAndAnnihilated) {
  Rng rng(3);
  const auto op = MeasurementOperator::vector_map(rng.gaussian_matrix(5, 9));
  const auto ns = NullspaceBasis::of(op);
  ASSERT_EQ(ns.dim(), 4u);
  EXPECT_LT(frobenius(transpose_times(ns.basis, ns.basis) - Matrix::identity(4)), 1e-10);
  for (std::size_t j = 0; j < ns.dim(); ++j) EXPECT_LT(l2(op.apply(ns.basis.col(j))), 1e-9);
}

TEST(RicExact, IdentityIsIsometry) {
  for (std::size_t k = 0; k <= 4; ++k) EXPECT_NEAR(ric_exact(Matrix::identity(4), k).value, 0.0, 1e-14);
}

TEST(RicExact, DiagonalExample) {
  const auto c = ric_exact(Matrix{{1, 0}, {0, 2}}, 1);
  EXPECT_DOUBLE_EQ(c.value, 3.0);
  EXPECT_TRUE(c.exact);
  EXPECT_EQ(c.enumeration_size, 2u);
  EXPECT_DOUBLE_EQ(std::abs(c.witness(1, 0)), 1.0);
}

TEST(RicExact, DctRowsMatchGridSearch) {
  const Matrix a = dct_rows(5, 8);
  const auto c = ric_exact(a, 2);
  EXPECT_NEAR(c.value, ric2_grid(a), 1e-6);
  EXPECT_NEAR(evaluate_witness(c, MeasurementOperator::vector_map(a)), c.value, 1e-8 * c.value);
}

TEST(RicExact, GaussianMatchesGridSearch) {
  Rng rng(17);
  Matrix a = rng.gaussian_matrix(6, 12);
  a *= 1.0 / std::sqrt(6.0);
  EXPECT_NEAR(ric_exact(a, 2).value, ric2_grid(a), 1e-6);
}

TEST(RicExact, MonotoneInKAndWitnessReproduces) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = rng.gaussian_matrix(4, 7);
    a *= 0.5;
    const auto op = MeasurementOperator::vector_map(a);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 7; ++k) {
      const auto c = ric_exact(op, k);
      EXPECT_GE(c.value, prev - 1e-12);
      EXPECT_GE(c.value, 0.0);
      EXPECT_NEAR(evaluate_witness(c, op), c.value, 1e-8 * std::max(1.0, c.value));
      prev = c.value;
    }
    // Past m columns some k-subset is rank deficient: delta >= 1.
    EXPECT_GE(ric_exact(op, 5).value, 1.0 - 1e-12);
  }
}

TEST(RicExact, RefusesAboveCapAndRejectsLargeK) {
  EXPECT_THROW(ric_exact(Matrix(2, 30), 10), RefusalError);
  EXPECT_THROW(ric_exact(Matrix(2, 3), 4), ArgumentError);
  EnumerationLimits tight;
  tight.max_supports = 5;
  EXPECT_THROW(ric_exact(Matrix::identity(4), 2, tight), RefusalError);
}

TEST(RicExact, TiesKeepSmallestSupport) {
  const auto c = ric_exact(Matrix::diagonal(Vector{2, 2, 2}), 1);
  EXPECT_DOUBLE_EQ(std::abs(c.witness(0, 0)), 1.0);
}

TEST(RocExact, UnitColumnsWithInnerProductHalf) {
  const Matrix a{{1, 0.5}, {0, std::sqrt(3.0) / 2}};
  const auto c = roc_exact(a, 1, 1);
  EXPECT_NEAR(c.value, 0.5, 1e-15);
  EXPECT_NEAR(evaluate_witness(c, MeasurementOperator::vector_map(a)), 0.5, 1e-14);
}

TEST(RocExact, OrthogonalColumnsGiveZero) {
  EXPECT_NEAR(roc_exact(Matrix::diagonal(Vector{1, 3, 2, 5}), 2, 2).value, 0.0, 1e-15);
}

TEST(RocExact, SymmetricAndMonotone) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = rng.gaussian_matrix(4, 7);
    const auto op = MeasurementOperator::vector_map(a);
    for (std::size_t k = 1; k <= 3; ++k)
      for (std::size_t k2 = 1; k + k2 <= 5; ++k2) {
        const auto c = roc_exact(a, k, k2);
        EXPECT_NEAR(c.value, roc_exact(a, k2, k).value, 1e-12);
        EXPECT_NEAR(evaluate_witness(c, op), c.value, 1e-8 * std::max(1.0, c.value));
        EXPECT_GE(roc_exact(a, k + 1, k2).value, c.value - 1e-12);
        EXPECT_GE(roc_exact(a, k, k2 + 1).value, c.value - 1e-12);
      }
  }
}

TEST(RocExact, SingleColumnPairsAreInnerProducts) {
  Rng rng(81);
  const Matrix a = rng.gaussian_matrix(3, 5);
  double best = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      if (i != j) best = std::max(best, std::abs(dot(a.col(i), a.col(j))));
  EXPECT_NEAR(roc_exact(a, 1, 1).value, best, 1e-12);
}

TEST(RocExact, RejectsOversizedSupports) {
  EXPECT_THROW(roc_exact(Matrix(2, 3), 2, 2), ArgumentError);
}

TEST(SspExact, FlatVector) {
  const auto ns = NullspaceBasis::from_span(Matrix{{1}, {1}, {1}, {1}});
  const auto c = ssp_exact(ns);
  EXPECT_NEAR(c.value, 4.0, 1e-12);
  EXPECT_TRUE(c.exact);
}

TEST(SspExact, CoordinateVector) {
  EXPECT_NEAR(ssp_exact(NullspaceBasis::from_span(Matrix{{1}, {0}, {0}})).value, 1.0, 1e-14);
}

TEST(SspExact, RandomPlanesMatchMultistartOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ns = NullspaceBasis::from_span(rng.gaussian_matrix(8, 2));
    const auto c = ssp_exact(ns);
    const double oracle =
        multistart_minimize([&](double th) { return ssp_ratio(on_circle(ns.basis, th)); }, 1000);
    EXPECT_NEAR(c.value, oracle, 1e-6);
    EXPECT_NEAR(ssp_ratio(c.witness.col(0)), c.value, 1e-8 * c.value);
    EXPECT_GE(c.value, 1.0);
  }
}

TEST(SspExact, NeverAboveSampledSubspaceElements) {
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ns = NullspaceBasis::from_span(rng.gaussian_matrix(9, 3));
    const double v = ssp_exact(ns).value;
    for (int s = 0; s < 2000; ++s)
      EXPECT_GE(ssp_ratio(ns.basis * rng.gaussian_vector(3)), v - 1e-12);
  }
}

TEST(SspExact, RefusesAndRejectsDegenerate) {
  EXPECT_THROW(ssp_exact(NullspaceBasis::from_span(Matrix(21, 1, 1.0))), RefusalError);
  EXPECT_THROW(ssp_exact(NullspaceBasis::of(MeasurementOperator::vector_map(Matrix::identity(3)))),
               DegenerateError);
}

TEST(NspVector, FlatVectorHolds) {
  const auto c = nsp_margin_vector(NullspaceBasis::from_span(Matrix{{1}, {1}, {1}, {1}}), 1);
  EXPECT_NEAR(c.value, -0.5, 1e-12);
}

TEST(NspVector, SparseKernelFailsMaximally) {
  EXPECT_NEAR(nsp_margin_vector(NullspaceBasis::from_span(Matrix{{1}, {0}, {0}}), 1).value, 1.0,
              1e-12);
}

TEST(NspVector, ZeroSparsityIsMinusOne) {
  Rng rng(1);
  EXPECT_DOUBLE_EQ(nsp_margin_vector(NullspaceBasis::from_span(rng.gaussian_matrix(6, 2)), 0).value,
                   -1.0);
}

TEST(NspVector, RandomPlanesMatchMultistartOracle) {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ns = NullspaceBasis::from_span(rng.gaussian_matrix(7, 2));
    const auto op = MeasurementOperator::vector_map(orthogonal_complement(ns.basis).transpose());
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto c = nsp_margin_vector(ns, k);
      const double oracle = -multistart_minimize(
          [&](double th) { return -nsp_ratio(on_circle(ns.basis, th), k); }, 1000);
      EXPECT_NEAR(c.value, oracle, 1e-6);
      EXPECT_NEAR(evaluate_witness(c, op), c.value, 1e-8);
      EXPECT_LT(l2(op.apply(c.witness.col(0))), 1e-9);
    }
  }
}

TEST(NspVector, MonotoneInK) {
  Rng rng(12);
  const auto ns = NullspaceBasis::of(MeasurementOperator::vector_map(rng.gaussian_matrix(6, 10)));
  double prev = -1.0;
  for (std::size_t k = 0; k <= 4; ++k) {
    const double v = nsp_margin_vector(ns, k).value;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(RicOperatorSampled, IdentityMapIsIsometric) {
  const auto c = ric_operator_sampled(MeasurementOperator::vectorization_identity(3, 4), 2, 20, 5);
  EXPECT_NEAR(c.value, 0.0, 1e-12);
  EXPECT_FALSE(c.exact);
}

TEST(RicOperatorSampled, NonDecreasingInPairs) {
  Rng rng(31);
  const auto op = gaussian_matrix_map(rng, 5, 2, 3);
  double prev = 0.0;
  for (std::size_t pairs : {1, 5, 20, 80}) {
    const double v = ric_operator_sampled(op, 1, pairs, 1234).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(RicOperatorSampled, ApproachesRankOneGridMaximum) {
  Rng rng(45);
  const auto op = gaussian_matrix_map(rng, 3, 2, 2);
  double grid = 0.0;
  const int steps = 720;
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < steps; ++b) {
      const double ta = kPi * a / steps;
      const double tb = kPi * b / steps;
      const Matrix x{{std::cos(ta) * std::cos(tb), std::cos(ta) * std::sin(tb)},
                     {std::sin(ta) * std::cos(tb), std::sin(ta) * std::sin(tb)}};
      const Vector ax = op.apply(x);
      grid = std::max(grid, std::abs(dot(ax, ax) - 1.0));
    }
  const auto c = ric_operator_sampled(op, 1, 500, 9);
  EXPECT_NEAR(c.value, grid, 1e-3);
  EXPECT_NEAR(evaluate_witness(c, op), c.value, 1e-8 * std::max(1.0, c.value));
  EXPECT_EQ(numerical_rank(singular_values(c.witness)), 1u);
}

TEST(RestrictionKernel, LiftsPreserveNormRatio) {
  Rng rng(63);
  const auto op = gaussian_matrix_map(rng, 2, 3, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pair = haar_unitary_pair(3, 4, derive_seed(63, trial));
    const auto ns = NullspaceBasis::of(MeasurementOperator::vector_map(restrict(op, pair).matrix));
    ASSERT_GE(ns.dim(), 1u);
    const Vector w = ns.basis.col(0);
    const Matrix lifted = pair.lift(w);
    EXPECT_LT(l2(op.apply(lifted)), 1e-9);
    EXPECT_NEAR(l1(w) / l2(w), nuclear(lifted) / frobenius(lifted), 1e-10);
  }
}

TEST(NspMatrixSampled, RankOneKernelFails) {
  Rng rng(4);
  const Matrix w0 = Matrix::from_column(rng.gaussian_vector(3)) *
                    Matrix::from_column(rng.gaussian_vector(3)).transpose();
  const auto op = operator_with_kernel(w0);
  const auto c = nsp_margin_matrix_sampled(op, 1, 50, 7);
  EXPECT_GT(c.value, 0.0);
  EXPECT_NEAR(c.value, 1.0, 1e-9);
  EXPECT_NEAR(std::abs(frobenius_inner(c.witness, w0)) / frobenius(w0), 1.0, 1e-9);
}

TEST(NspMatrixSampled, TrivialKernelIsDegenerate) {
  EXPECT_THROW(nsp_margin_matrix_sampled(MeasurementOperator::vectorization_identity(2, 3), 1, 10, 0),
               DegenerateError);
}

TEST(NspMatrixSampled, OneDimensionalKernelMatchesDirectEvaluation) {
  Rng rng(19);
  const auto op = gaussian_matrix_map(rng, 11, 3, 4);
  const auto ns = NullspaceBasis::of(op);
  ASSERT_EQ(ns.dim(), 1u);
  const Vector s = singular_values(ns.element(Vector{1.0}));
  for (std::size_t k = 1; k <= 3; ++k) {
    double head = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      total += s[i];
      if (i < k) head += s[i];
    }
    const auto c = nsp_margin_matrix_sampled(op, k, 10, 3);
    EXPECT_NEAR(c.value, (2.0 * head - total) / total, 1e-12);
    EXPECT_NEAR(evaluate_witness(c, op), c.value, 1e-8);
  }
}

TEST(NspMatrixSampled, LocalAscentNeverLosesToItsStarts) {
  Rng rng(21);
  const auto op = gaussian_matrix_map(rng, 5, 3, 3);
  const auto ns = NullspaceBasis::of(op);
  const auto c = nsp_margin_matrix_sampled(op, 1, 100, 11);
  Rng probe(11);
  const auto f = nuclear_nsp_objective(1);
  for (int i = 0; i < 100; ++i)
    EXPECT_LE(f(singular_values(ns.element(probe.unit_vector(ns.dim()))), nullptr), c.value + 1e-12);
  EXPECT_LT(l2(op.apply(c.witness)), 1e-9);
  EXPECT_NEAR(frobenius(c.witness), 1.0, 1e-12);
  EXPECT_NEAR(evaluate_witness(c, op), c.value, 1e-8);
}

TEST(NspMatrixSampled, DeterministicForFixedSeed) {
  Rng rng(22);
  const auto op = gaussian_matrix_map(rng, 4, 3, 3);
  const auto a = nsp_margin_matrix_sampled(op, 1, 40, 5);
  const auto b = nsp_margin_matrix_sampled(op, 1, 40, 5);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(SpectralObjectives, GradientsMatchFiniteDifferences) {
  const Vector s{3.0, 1.5, 0.7, 0.2};
  for (double p : {1.0, 0.5}) {
    const auto f = schatten_nsp_objective(2, p);
    Vector g;
    f(s, &g);
    for (std::size_t i = 0; i < s.size(); ++i) {
      Vector up = s;
      Vector dn = s;
      up[i] += 1e-6;
      dn[i] -= 1e-6;
      EXPECT_NEAR(g[i], (f(up, nullptr) - f(dn, nullptr)) / 2e-6, 1e-7);
    }
  }
  EXPECT_THROW(schatten_nsp_objective(1, 1.5), ArgumentError);
}

TEST(NspSchattenSampled, RankOneKernelFailsAndRecordsP) {
  Rng rng(41);
  const Matrix w0 = Matrix::from_column(rng.gaussian_vector(2)) *
                    Matrix::from_column(rng.gaussian_vector(3)).transpose();
  const auto c = nsp_margin_schatten_sampled(operator_with_kernel(w0), 1, 0.5, 20, 1);
  EXPECT_NEAR(c.value, 1.0, 1e-9);
  ASSERT_TRUE(c.p.has_value());
  EXPECT_EQ(*c.p, 0.5);
}
