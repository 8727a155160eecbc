#include "rankrec/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rankrec {

namespace {

constexpr double kEps = 1e-9;
constexpr std::size_t kDegenerateLimit = 50;

// Tableau layout follows the classic dictionary form: row i < m holds basic
// variable basis[i]; row m is the phase-2 objective, row m + 1 the phase-1
// objective. Column n is the artificial variable, column n + 1 the rhs.
class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const Vector& c)
      : m_(a.rows()), n_(a.cols()), basis_(m_), nonbasis_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) d_[i][j] = a(i, j);
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = static_cast<long>(n_ + i);
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = static_cast<long>(j);
      d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  LpResult solve(std::size_t max_pivots) {
    max_pivots_ = max_pivots;
    LpResult res;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(2) || d_[m_ + 1][n_ + 1] < -kEps) {
        res.status = LpStatus::Infeasible;
        res.pivots = pivots_;
        return res;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j)
          if (d_[i][j] < d_[i][s] || (d_[i][j] == d_[i][s] && nonbasis_[j] < nonbasis_[s])) s = j;
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    res.pivots = pivots_;
    res.x = Vector(n_);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < static_cast<long>(n_))
        res.x[static_cast<std::size_t>(basis_[i])] = d_[i][n_ + 1];
    if (!bounded) {
      res.status = LpStatus::Unbounded;
      res.objective = std::numeric_limits<double>::infinity();
      return res;
    }
    res.status = LpStatus::Optimal;
    res.objective = d_[m_][n_ + 1];
    return res;
  }

 private:
  void pivot(std::size_t r, std::size_t s) {
    if (++pivots_ > max_pivots_) throw NumericalError("simplex: pivot cap exceeded");
    const double inv = 1.0 / d_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(d_[i][s]) <= 0.0) continue;
      const double f = d_[i][s] * inv;
      for (std::size_t j = 0; j < n_ + 2; ++j) d_[i][j] -= d_[r][j] * f;
      d_[i][s] = -f;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j) d_[r][j] *= inv;
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  // Largest-coefficient pricing; among near-tied minimum ratios the largest
  // pivot element leaves, for stability. After a run of degenerate pivots both
  // choices switch to Bland's lowest-label rule until progress resumes, which
  // rules out cycling.
  bool run(int phase) {
    const std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
    std::size_t degenerate_run = 0;
    for (;;) {
      const bool bland = degenerate_run >= kDegenerateLimit;
      long s = -1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase) continue;
        const double dj = d_[obj][j];
        if (dj >= -kEps) continue;
        if (s == -1) {
          s = static_cast<long>(j);
          continue;
        }
        const auto cur = static_cast<std::size_t>(s);
        if (bland ? nonbasis_[j] < nonbasis_[cur]
                  : (dj < d_[obj][cur] || (dj == d_[obj][cur] && nonbasis_[j] < nonbasis_[cur])))
          s = static_cast<long>(j);
      }
      if (s == -1) return true;
      const auto sc = static_cast<std::size_t>(s);

      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i)
        if (d_[i][sc] > kEps) best = std::min(best, d_[i][n_ + 1] / d_[i][sc]);
      if (!std::isfinite(best)) return false;
      long r = -1;
      for (std::size_t i = 0; i < m_; ++i) {
        if (d_[i][sc] <= kEps) continue;
        if (d_[i][n_ + 1] / d_[i][sc] > best + kEps) continue;
        if (r == -1) {
          r = static_cast<long>(i);
          continue;
        }
        const auto cur = static_cast<std::size_t>(r);
        if (bland ? basis_[i] < basis_[cur]
                  : (d_[i][sc] > d_[cur][sc] || (d_[i][sc] == d_[cur][sc] && basis_[i] < basis_[cur])))
          r = static_cast<long>(i);
      }
      degenerate_run = best <= kEps ? degenerate_run + 1 : 0;
      pivot(static_cast<std::size_t>(r), sc);
    }
  }

  std::size_t m_, n_;
  std::vector<long> basis_, nonbasis_;
  std::vector<std::vector<double>> d_;
  std::size_t pivots_ = 0;
  std::size_t max_pivots_ = 0;
};

}  // namespace

LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c, std::size_t max_pivots) {
  if (b.size() != a.rows() || c.size() != a.cols())
    throw ArgumentError("solve_lp: dimension mismatch");
  return Tableau(a, b, c).solve(max_pivots);
}

}  // namespace rankrec
