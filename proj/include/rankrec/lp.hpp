#pragma once

#include <cstddef>

#include "rankrec/linalg.hpp"

namespace rankrec {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vector x;
  std::size_t pivots = 0;
};

/// maximize c^T x subject to A x <= b, x >= 0.
///
/// Dense two-phase tableau simplex. Pricing is largest-coefficient; runs of
/// degenerate pivots switch to Bland's rule for both the entering and the
/// leaving variable, so degenerate problems terminate. Intended for the small
/// LPs that appear in certification (tens of rows and columns).
/// Throws NumericalError if the pivot cap is exceeded.
LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c,
                  std::size_t max_pivots = 200000);

}  // namespace rankrec
