#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankrec/linalg.hpp"

namespace rankrec {

namespace {

constexpr double kNegligible = 1e-280;

double row_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Hestenes one-sided Jacobi on the rows of b: rotates pairs of rows until every
// pair is orthogonal to the Jacobi threshold. Rotations are accumulated into the
// columns of q when given, so that (original b) = q * (final b).
void orthogonalize_rows(Matrix& b, Matrix* q) {
  const std::size_t n = b.rows();
  const std::size_t len = b.cols();
  const std::size_t max_sweeps = 100 * std::max(b.rows(), b.cols());
  const double threshold = tolerances().jacobi_threshold;

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto ri = b.row(i);
        auto rj = b.row(j);
        const double alpha = row_dot(ri, ri);
        const double beta = row_dot(rj, rj);
        const double gamma = row_dot(ri, rj);
        if (gamma == 0.0) continue;
        // Rows this small carry no usable precision; rotating them never settles.
        if (alpha < kNegligible || beta < kNegligible) continue;
        if (std::abs(gamma) <= threshold * std::sqrt(alpha) * std::sqrt(beta)) continue;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < len; ++k) {
          const double x = ri[k];
          const double y = rj[k];
          ri[k] = c * x - s * y;
          rj[k] = s * x + c * y;
        }
        if (q != nullptr) {
          for (std::size_t k = 0; k < q->rows(); ++k) {
            const double x = (*q)(k, i);
            const double y = (*q)(k, j);
            (*q)(k, i) = c * x - s * y;
            (*q)(k, j) = s * x + c * y;
          }
        }
        rotated = true;
      }
    }
    if (!rotated) return;
  }
  throw NumericalError("svd: Jacobi sweeps did not converge within " +
                       std::to_string(max_sweeps) + " sweeps");
}

std::vector<std::size_t> descending_order(const Vector& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return order;
}

// Fills the zero columns of v (flagged in missing) with unit vectors orthogonal
// to every other column, choosing standard basis candidates greedily.
void complete_orthonormal(Matrix& v, const std::vector<bool>& missing) {
  const std::size_t n = v.rows();
  for (std::size_t c = 0; c < v.cols(); ++c) {
    if (!missing[c]) continue;
    Vector best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < n; ++e) {
      Vector cand(n);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t o = 0; o < v.cols(); ++o) {
          if (o == c || (missing[o] && o > c)) continue;
          double proj = 0.0;
          for (std::size_t k = 0; k < n; ++k) proj += v(k, o) * cand[k];
          for (std::size_t k = 0; k < n; ++k) cand[k] -= proj * v(k, o);
        }
      }
      const double nrm = l2(cand);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = cand;
      }
    }
    if (best_norm <= 0.0) throw NumericalError("svd: could not complete orthonormal basis");
    best *= 1.0 / best_norm;
    v.set_col(c, best);
  }
}

void fix_signs(SvdResult& r) {
  for (std::size_t j = 0; j < r.U.cols(); ++j) {
    for (std::size_t i = 0; i < r.U.rows(); ++i) {
      const double u = r.U(i, j);
      if (std::abs(u) > 1e-12) {
        if (u < 0.0) {
          for (std::size_t k = 0; k < r.U.rows(); ++k) r.U(k, j) = -r.U(k, j);
          for (std::size_t k = 0; k < r.V.rows(); ++k) r.V(k, j) = -r.V(k, j);
        }
        break;
      }
    }
  }
}

// Requires rows <= cols.
SvdResult svd_wide(const Matrix& m) {
  const std::size_t n1 = m.rows();
  const std::size_t n2 = m.cols();
  Matrix b = m;
  Matrix q = Matrix::identity(n1);
  orthogonalize_rows(b, &q);

  Vector norms(n1);
  for (std::size_t i = 0; i < n1; ++i) norms[i] = std::sqrt(row_dot(b.row(i), b.row(i)));
  const auto order = descending_order(norms);

  SvdResult r{Matrix(n1, n1), Vector(n1), Matrix(n2, n1)};
  std::vector<bool> missing(n1, false);
  for (std::size_t c = 0; c < n1; ++c) {
    const std::size_t src = order[c];
    const double s = norms[src];
    r.sigma[c] = s;
    for (std::size_t k = 0; k < n1; ++k) r.U(k, c) = q(k, src);
    if (s > 1e-290) {
      auto row = b.row(src);
      for (std::size_t k = 0; k < n2; ++k) r.V(k, c) = row[k] / s;
    } else {
      r.sigma[c] = 0.0;
      missing[c] = true;
    }
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end())
    complete_orthonormal(r.V, missing);
  fix_signs(r);
  return r;
}

}  // namespace

Matrix SvdResult::reconstruct() const {
  Matrix us = U;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= sigma[j];
  Matrix out(U.rows(), V.rows());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < sigma.size(); ++k) s += us(i, k) * V(j, k);
      out(i, j) = s;
    }
  return out;
}

SvdResult svd(const Matrix& m) {
  if (!m.all_finite()) throw ArgumentError("svd: input has non-finite entries");
  if (m.rows() <= m.cols()) return svd_wide(m);
  SvdResult t = svd_wide(m.transpose());
  SvdResult r{std::move(t.V), std::move(t.sigma), std::move(t.U)};
  fix_signs(r);
  return r;
}

Vector singular_values(const Matrix& m) {
  if (!m.all_finite()) throw ArgumentError("singular_values: input has non-finite entries");
  Matrix b = m.rows() <= m.cols() ? m : m.transpose();
  orthogonalize_rows(b, nullptr);
  Vector s(b.rows());
  for (std::size_t i = 0; i < b.rows(); ++i) s[i] = std::sqrt(row_dot(b.row(i), b.row(i)));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

std::size_t numerical_rank(const Vector& sigma) {
  if (sigma.empty() || sigma[0] <= 0.0) return 0;
  const double cut = tolerances().rank_relative * sigma[0];
  std::size_t r = 0;
  for (double s : sigma)
    if (s > cut) ++r;
  return r;
}

}  // namespace rankrec
