#pragma once

// Property checks for singular-value inequalities and recovery theorems.
// Every check produces an Inequality (lhs <= rhs is the claim); sweeps and
// experiments fold them into a PropertyReport that keeps the worst instance
// as a serialized witness, so each report can be re-evaluated later.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankrec/linalg.hpp"

namespace rankrec {

struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;

  double slack() const { return rhs - lhs; }
  double magnitude() const;
  /// slack >= -tol * max(1, |lhs|, |rhs|).
  bool holds(double tol) const;
};

/// Named matrices and scalars that reproduce one checked instance.
struct Witness {
  std::map<std::string, Matrix> matrices;
  std::map<std::string, double> params;

  const Matrix& matrix(const std::string& name) const;
  double param(const std::string& name) const;
  friend bool operator==(const Witness&, const Witness&) = default;
};

struct PropertyReport {
  std::string property;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::size_t skipped = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  Witness witness;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  /// Non-gating reports (the conjecture scan) never fail a run.
  bool gating = true;

  bool passed() const { return !gating || failures == 0; }

  /// Counts one checked instance. `make_witness` runs only when the instance
  /// becomes the worst one seen.
  void record(const Inequality& q, const std::function<Witness()>& make_witness);
  void skip() {
    ++instances;
    ++skipped;
  }

  friend bool operator==(const PropertyReport&, const PropertyReport&) = default;
};

/// Sums counts and keeps the smaller worst slack (ties go to the witness with
/// the smaller serialization), so merging is associative and commutative.
PropertyReport merge(const PropertyReport& a, const PropertyReport& b);

std::string to_json(const PropertyReport& r);
PropertyReport report_from_json(const std::string& text);
/// Header "property,instances,failures,skipped,worst_slack,seed" plus one row
/// per report.
std::string to_csv(const std::vector<PropertyReport>& reports);
/// Parses to_csv output (lines starting with '#' are skipped). Witnesses and
/// tolerances are not part of the CSV and come back empty / default.
std::vector<PropertyReport> reports_from_csv(const std::string& text);

/// Recomputes the worst slack from the stored witness.
double reevaluate(const PropertyReport& r);

// ---------------------------------------------------------------------------
// Singular-value inequalities

/// sigma_i(X)^p, with values at or below rank_relative * max(sigma_1, reference)
/// treated as zero so rounding-level singular values do not leak into p < 1
/// powers. Pass the scale of the operands when X is a difference or a sum.
Vector powered_spectrum(const Matrix& x, double p, double reference = 0.0);

/// sum |sigma_i(X) - sigma_i(Y)| <= ||X - Y||_*.
Inequality check_key_lemma(const Matrix& x, const Matrix& y);

/// With X1 = -U Sigma_{X0} V^T from the SVD of W: ||X1 + W||_* <= ||X1||_*.
/// Empty when ||X0 + W||_* > ||X0||_* (the precondition).
std::optional<Inequality> check_alignment_lemma(const Matrix& x0, const Matrix& w);

/// sum_{i<=k} (sigma_i^p(A) - sigma_i^p(B)) <= sum_{i<=k} sigma_i^p(A - B).
Inequality check_pmaj(const Matrix& a, const Matrix& b, double p, std::size_t k);

/// sigma_{t+s-1}(A + B) <= sigma_t(A) + sigma_s(B), 1-based indices.
Inequality check_weyl(const Matrix& a, const Matrix& b, std::size_t t, std::size_t s);

/// sum_{i=2k+1}^n sigma_i^p(A) <= sum_{i=k+1}^{n-k} sigma_i^p(A - B). Empty
/// when rank(B) > k.
std::optional<Inequality> check_lowertri(const Matrix& a, const Matrix& b, double p,
                                         std::size_t k);

/// sum |sigma_i^p(A) - sigma_i^p(B)| <= sum sigma_i^p(A - B) (conjectured).
Inequality conjecture_gap(const Matrix& a, const Matrix& b, double p);

// ---------------------------------------------------------------------------
// Instance generation and sweeps

enum class Suite { Smoke, Standard, Deep };

std::string to_string(Suite s);
Suite suite_from_string(const std::string& s);
/// 1e2, 1e4, 1e6.
std::size_t suite_instances(Suite s);

enum class PairFamily { Gaussian, EqualSpectrum, Clustered, RankDeficient, Aligned, Truncated };
inline constexpr std::size_t kPairFamilies = 6;

struct MatrixPair {
  Matrix a;
  Matrix b;
};

MatrixPair generate_pair(PairFamily family, std::size_t rows, std::size_t cols,
                         std::uint64_t seed);

/// Instance i of a sweep draws its family (i mod 6), shape and entries from
/// derive_seed(seed, i); [first, first + instances) sweeps merge into the full
/// sweep.
struct SweepOptions {
  std::size_t instances = 100;
  std::uint64_t seed = 0;
  std::size_t first = 0;
  std::size_t max_rows = 8;
  std::size_t max_cols = 12;
  double tolerance = 1e-9;
};

PropertyReport sweep_key_lemma(const SweepOptions& opts);
PropertyReport sweep_alignment(const SweepOptions& opts);
/// Every k and every p in ps; the instance slack is the worst (p, k) check.
PropertyReport sweep_pmaj(const SweepOptions& opts,
                          const std::vector<double>& ps = {0.25, 0.5, 0.75, 1.0});
/// Full (t, s) grid per instance.
PropertyReport sweep_weyl(const SweepOptions& opts);
/// Every k <= floor(n / 2) and every p in ps; B is rank k by construction.
PropertyReport sweep_lowertri(const SweepOptions& opts,
                              const std::vector<double>& ps = {0.25, 0.5, 0.75, 1.0});
/// Evidence only: the report is non-gating for p < 1.
PropertyReport scan_conjecture(double p, const SweepOptions& opts);

// ---------------------------------------------------------------------------
// Recovery experiments

/// Per Haar pair: restriction probes agree with direct evaluation (1e-10,
/// relative), kernel vectors of A_{U,V} lift into the kernel of the operator
/// (1e-9), singular values of lifted elements equal sorted_abs (1e-10), and,
/// when `operator_ric` is given, ric_exact(A_{U,V}, k) <= operator_ric + 1e-9.
/// Slacks are normalized by these tolerances. If the operator has a kernel,
/// pair 0 is built from the SVD of a kernel element.
PropertyReport main_theorem_experiment(const MeasurementOperator& op, std::size_t k,
                                       std::size_t pairs, std::uint64_t seed,
                                       std::optional<double> operator_ric = std::nullopt);

/// Certified lower bound on the spherical section constant of a matrix map
/// with kernel dimension <= 2 (exact for dimension 1, Lipschitz-bounded angle
/// grid for dimension 2, +inf for a trivial kernel). Empty for larger kernels.
std::optional<double> ssp_operator_lower_bound(const MeasurementOperator& op,
                                               std::size_t grid_points = 20000);

/// 2 / (1 - 2 sqrt(k / delta)); ArgumentError unless delta > 4k.
double ssp_recovery_constant(std::size_t k, double delta);

/// Planted rank-k plus tail instances, solved by nuclear norm minimization:
/// ||X* - X0||_* <= C ||X0 - X0^k||_* + 1e-6. Everything is skipped when
/// delta_hat <= 4k.
PropertyReport ssp_recovery_experiment(const MeasurementOperator& op, std::size_t k,
                                       double delta_hat, std::size_t instances,
                                       std::uint64_t seed, double tail_scale = 1e-2);

struct RobustnessBound {
  enum class Kind { L2OfTail, L1OfTail, NuclearOfTail, FrobeniusOfTail, Noise };
  Kind kind = Kind::NuclearOfTail;
  /// C; or C1, C2 for L2OfTail; or C3 for L1OfTail.
  std::vector<double> constants;
  std::size_t k = 1;

  /// Error bound given the tail norm of the signal and the noise level.
  double evaluate(double tail, double epsilon) const;
};

void validate(const RobustnessBound& b);

enum class RobustnessLemma { Nuclear, Frobenius, Noise };

std::string to_string(RobustnessLemma l);
RobustnessLemma robustness_lemma_from_string(const std::string& s);

struct RobustnessOptions {
  std::size_t instances = 20;
  std::size_t search_samples = 200;
  std::vector<double> epsilons = {0.01, 0.1, 1.0};
  double tail_scale = 0.05;
  std::uint64_t seed = 0;
};

struct RobustnessReport {
  RobustnessBound bound;
  /// Sampled maximum of the normalized nullspace-side violation; < 0 means
  /// no violation was found. -inf for a vacuous condition.
  double nullspace_value = -std::numeric_limits<double>::infinity();
  bool nullspace_holds = true;
  /// Kernel (or cone) element attaining nullspace_value, unit Frobenius norm.
  Matrix nullspace_witness;
  /// Solver outputs against the bound; all skipped when the nullspace side fails.
  PropertyReport recovery;
  /// Instance built from nullspace_witness that violates the bound; the
  /// single check passes when the violation is confirmed.
  std::optional<PropertyReport> converse;
};

RobustnessReport robustness_equivalence_experiment(RobustnessLemma lemma,
                                                   const MeasurementOperator& op, std::size_t k,
                                                   double c, const RobustnessOptions& opts);

struct SchattenNspOptions {
  std::size_t instances = 10;
  std::size_t kernel_samples = 1000;
  std::size_t search_samples = 200;
  std::uint64_t seed = 0;
};

/// When the sampled 2k Schatten-p margin is negative: IRLS recovers planted
/// rank-k signals (relative Frobenius error 1e-4) and Tr|X0 + W|^p >= Tr|X0|^p
/// on sampled kernel elements. Skipped otherwise.
PropertyReport check_schatten_nsp_sufficient(const MeasurementOperator& op, double p,
                                             std::size_t k, const SchattenNspOptions& opts);

/// For W violating the k-term condition, X0 = -W^k satisfies
/// Tr|X0 + W|^p < Tr|X0|^p for the operator whose kernel is span{W}.
/// Skipped when W satisfies the condition.
PropertyReport check_schatten_nsp_necessary(const Matrix& w, double p, std::size_t k);

/// Matrix map whose kernel is exactly the span of the given matrices; its
/// rows are an orthonormal basis of the complement.
MeasurementOperator operator_with_kernel(const std::vector<Matrix>& kernel);

}  // namespace rankrec
