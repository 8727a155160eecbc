#pragma once

#include "rankrec/linalg.hpp"

namespace rankrec::detail {

/// Minimum-norm least-squares fit of A x = y on the support of x, dropping
/// entries with |x_i| <= rel * max|x|. Empty when the support is empty.
Vector support_refit(const Matrix& a, const Vector& y, const Vector& x, double rel);

/// Fit of A(X) = y over X = U_r M V_r^T, where U_r, V_r are the singular
/// vectors of x (vectorized n1 x n2) with sigma_i > rel * sigma_1.
Vector subspace_refit(const MeasurementOperator& op, const Vector& y, const Vector& x, double rel);

}  // namespace rankrec::detail
