#pragma once

// Phase-transition experiments: success rate of exact recovery over a grid of
// measurement counts, sparsity levels / ranks and exponents p.

#include <cstdint>
#include <string>
#include <vector>

#include "rankrec/linalg.hpp"

namespace rankrec {

enum class GridFamily { GaussianVector, GaussianMatrix, DiagonalRestricted };

std::string to_string(GridFamily f);
GridFamily grid_family_from_string(const std::string& s);

/// gaussian-vector: k-sparse x in R^n, Gaussian A / sqrt(m).
/// gaussian-matrix: rank-k X in R^{n1 x n2}, Gaussian matrix map / sqrt(m).
/// diagonal-restricted: X = U diag(x) V^T with k-sparse x and a Haar pair
/// (U, V) drawn per trial, same operator family as gaussian-matrix.
struct ExperimentGrid {
  GridFamily family = GridFamily::GaussianVector;
  std::size_t n = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<std::size_t> m_values;
  std::vector<std::size_t> k_values;
  /// p = 1 runs the convex program (ADMM); p < 1 runs IRLS.
  std::vector<double> p_values{1.0};
  std::size_t seeds_per_cell = 10;
  /// Upper bound on cells x seeds_per_cell.
  std::size_t budget = 20'000;

  std::size_t cells() const { return m_values.size() * k_values.size() * p_values.size(); }
};

/// Shape and range checks; RefusalError when the grid exceeds its budget.
void validate(const ExperimentGrid& grid);

/// m and k accept a list or {"from", "to", "step"} (inclusive; step defaults
/// to 1). Keys: family, n | n1 + n2, m, k, p, seeds_per_cell, budget.
ExperimentGrid grid_from_json(const std::string& text);
std::string to_json(const ExperimentGrid& grid);

struct PhaseTransitionRow {
  GridFamily family = GridFamily::GaussianVector;
  std::size_t m = 0;
  std::size_t k = 0;
  double p = 1.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_relative_error = 0.0;
  double mean_iterations = 0.0;

  friend bool operator==(const PhaseTransitionRow&, const PhaseTransitionRow&) = default;
};

/// Relative error below this counts as exact recovery.
inline constexpr double kRecoverySuccess = 1e-4;

/// One row per (m, k, p) cell in m-major order. Trial t of the c-th (m, k)
/// pair draws from derive_seed(derive_seed(seed, c), t) for every p, so the
/// exponents see identical instances. Validates (and so refuses) first.
std::vector<PhaseTransitionRow> phase_transition(const ExperimentGrid& grid, std::uint64_t seed);

/// Header "family,m,k,p,trials,successes,success_rate,mean_relative_error,
/// mean_iterations,seed"; lines starting with '#' are comments.
std::string to_csv(const std::vector<PhaseTransitionRow>& rows, std::uint64_t seed);
std::vector<PhaseTransitionRow> phase_transition_from_csv(const std::string& text);

}  // namespace rankrec
