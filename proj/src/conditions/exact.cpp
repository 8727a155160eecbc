#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rankrec/conditions.hpp"
#include "rankrec/lp.hpp"

namespace rankrec {

std::string to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::RIC: return "RIC";
    case ConditionKind::ROC: return "ROC";
    case ConditionKind::SSP: return "SSP";
    case ConditionKind::NspVector: return "NSP-vector";
    case ConditionKind::NspMatrix: return "NSP-matrix";
    case ConditionKind::NspSchattenP: return "NSP-schatten-p";
  }
  return "unknown";
}

ConditionKind condition_kind_from_string(const std::string& s) {
  for (auto k : {ConditionKind::RIC, ConditionKind::ROC, ConditionKind::SSP,
                 ConditionKind::NspVector, ConditionKind::NspMatrix, ConditionKind::NspSchattenP})
    if (to_string(k) == s) return k;
  throw ArgumentError("unknown certificate kind \"" + s + "\"");
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

NullspaceBasis NullspaceBasis::of(const MeasurementOperator& op) {
  NullspaceBasis ns;
  ns.matrix_domain = op.is_matrix_map();
  ns.n1 = op.n1();
  ns.n2 = op.n2();
  ns.basis = nullspace(op.coefficients());
  return ns;
}

NullspaceBasis NullspaceBasis::from_span(const Matrix& spanning) {
  NullspaceBasis ns;
  ns.n1 = spanning.rows();
  ns.n2 = 1;
  SvdResult s = svd(spanning);
  const std::size_t r = numerical_rank(s.sigma);
  ns.basis = s.U.block(0, 0, spanning.rows(), r);
  return ns;
}

Matrix NullspaceBasis::element(const Vector& coords) const {
  return Matrix::unvec(basis * coords, n1, n2);
}

namespace {

// Advances idx to the next k-subset of {0..n-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

void require_cap(std::uint64_t count, std::uint64_t cap, const std::string& what) {
  if (count > cap)
    throw RefusalError(what + ": enumeration of " + std::to_string(count) +
                       " cases exceeds the cap of " + std::to_string(cap) +
                       "; use a sampled certifier");
}

Matrix embed_column(const Vector& local, const std::vector<std::size_t>& support, std::size_t n) {
  Matrix w(n, 1);
  for (std::size_t i = 0; i < support.size(); ++i) w(support[i], 0) = local[i];
  return w;
}

}  // namespace

ConditionCertificate ric_exact(const Matrix& a, std::size_t k, const EnumerationLimits& lim) {
  const std::size_t n = a.cols();
  if (k > n) throw ArgumentError("ric_exact: k exceeds the number of columns");
  ConditionCertificate cert;
  cert.kind = ConditionKind::RIC;
  cert.k = k;
  cert.exact = true;
  cert.enumeration_size = binomial(n, k);
  require_cap(cert.enumeration_size, lim.max_supports, "ric_exact");
  cert.witness = Matrix(n, 1);
  if (k == 0) return cert;

  double best = -1.0;
  auto support = first_combination(k);
  do {
    const Matrix as = a.cols_subset(support);
    // Eigen-decomposition of the Gram matrix: for a symmetric PSD matrix the
    // SVD factors coincide with eigenvectors.
    const SvdResult g = svd(transpose_times(as, as));
    const double upper = g.sigma[0] - 1.0;
    const double lower = 1.0 - g.sigma[k - 1];
    const double value = std::max(upper, lower);
    if (value > best) {
      best = value;
      cert.witness = embed_column(g.U.col(upper >= lower ? 0 : k - 1), support, n);
    }
  } while (next_combination(support, n));
  cert.value = std::max(best, 0.0);
  return cert;
}

ConditionCertificate ric_exact(const MeasurementOperator& a, std::size_t k,
                               const EnumerationLimits& lim) {
  return ric_exact(a.coefficients(), k, lim);
}

ConditionCertificate roc_exact(const Matrix& a, std::size_t k, std::size_t k2,
                               const EnumerationLimits& lim) {
  const std::size_t n = a.cols();
  if (k + k2 > n) throw ArgumentError("roc_exact: k + k2 exceeds the number of columns");
  ConditionCertificate cert;
  cert.kind = ConditionKind::ROC;
  cert.k = k;
  cert.k2 = k2;
  cert.exact = true;
  const std::uint64_t outer = binomial(n, k);
  const std::uint64_t inner = binomial(n - k, k2);
  cert.enumeration_size =
      (inner != 0 && outer > std::numeric_limits<std::uint64_t>::max() / inner)
          ? std::numeric_limits<std::uint64_t>::max()
          : outer * inner;
  require_cap(cert.enumeration_size, lim.max_supports, "roc_exact");
  cert.witness = Matrix(n, 2);
  if (k == 0 || k2 == 0) return cert;

  double best = -1.0;
  auto s1 = first_combination(k);
  std::vector<bool> used(n);
  do {
    std::fill(used.begin(), used.end(), false);
    for (std::size_t i : s1) used[i] = true;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) rest.push_back(i);
    const Matrix as = a.cols_subset(s1);
    auto pick = first_combination(k2);
    do {
      std::vector<std::size_t> s2(k2);
      for (std::size_t i = 0; i < k2; ++i) s2[i] = rest[pick[i]];
      const SvdResult r = svd(transpose_times(as, a.cols_subset(s2)));
      if (r.sigma[0] > best) {
        best = r.sigma[0];
        Matrix w(n, 2);
        for (std::size_t i = 0; i < k; ++i) w(s1[i], 0) = r.U(i, 0);
        for (std::size_t i = 0; i < k2; ++i) w(s2[i], 1) = r.V(i, 0);
        cert.witness = std::move(w);
      }
    } while (next_combination(pick, rest.size()));
  } while (next_combination(s1, n));
  cert.value = best;
  return cert;
}

ConditionCertificate roc_exact(const MeasurementOperator& a, std::size_t k, std::size_t k2,
                               const EnumerationLimits& lim) {
  return roc_exact(a.coefficients(), k, k2, lim);
}

ConditionCertificate ssp_exact(const NullspaceBasis& ns, const EnumerationLimits& lim) {
  const std::size_t n = ns.ambient();
  const std::size_t d = ns.dim();
  if (d == 0) throw DegenerateError("ssp_exact: the subspace is {0}");
  if (n > lim.max_sign_dim)
    throw RefusalError("ssp_exact: ambient dimension " + std::to_string(n) +
                       " exceeds the exact-enumeration limit " +
                       std::to_string(lim.max_sign_dim));
  ConditionCertificate cert;
  cert.kind = ConditionKind::SSP;
  cert.exact = true;
  cert.enumeration_size = binomial(n, d - 1);
  require_cap(cert.enumeration_size, lim.max_supports, "ssp_exact");

  double best = std::numeric_limits<double>::infinity();
  auto zeros = first_combination(d - 1);
  Matrix sub(d - 1, d);
  do {
    for (std::size_t r = 0; r < d - 1; ++r)
      for (std::size_t c = 0; c < d; ++c) sub(r, c) = ns.basis(zeros[r], c);
    const Matrix dir = d == 1 ? Matrix::identity(1) : nullspace(sub);
    if (dir.cols() != 1) continue;
    Vector w = ns.basis * dir.col(0);
    // Coordinates forced to zero are exactly zero at the vertex.
    for (std::size_t z : zeros) w[z] = 0.0;
    const double w2 = l2(w);
    if (w2 == 0.0) continue;
    const double ratio = std::pow(l1(w) / w2, 2);
    if (ratio < best) {
      best = ratio;
      cert.witness = Matrix::from_column((1.0 / w2) * w);
    }
  } while (next_combination(zeros, n));
  if (!std::isfinite(best)) throw DegenerateError("ssp_exact: no admissible vertex found");
  cert.value = best;
  return cert;
}

ConditionCertificate nsp_margin_vector(const NullspaceBasis& ns, std::size_t k,
                                       const EnumerationLimits& lim) {
  const std::size_t n = ns.ambient();
  const std::size_t d = ns.dim();
  if (d == 0) throw DegenerateError("nsp_margin_vector: the nullspace is {0}");
  if (k > n) throw ArgumentError("nsp_margin_vector: k exceeds the ambient dimension");
  ConditionCertificate cert;
  cert.kind = ConditionKind::NspVector;
  cert.k = k;
  cert.exact = true;
  const std::uint64_t supports = binomial(n, k);
  const std::uint64_t signs = k == 0 ? 1 : (std::uint64_t{1} << (k - 1));
  if (k > 62) throw RefusalError("nsp_margin_vector: sign enumeration too large");
  cert.enumeration_size =
      supports > std::numeric_limits<std::uint64_t>::max() / signs ? supports : supports * signs;
  require_cap(cert.enumeration_size, lim.max_supports, "nsp_margin_vector");

  if (k == 0) {
    Vector w = ns.basis.col(0);
    cert.value = -1.0;
    cert.witness = Matrix::from_column((1.0 / l1(w)) * w);
    return cert;
  }

  // LP in variables [c+ (d), c- (d), t (n)]:
  //   maximize  s^T (N c)_S
  //   subject to  N c - t <= 0,  -N c - t <= 0,  sum t <= 1.
  const std::size_t nv = 2 * d + n;
  Matrix a(2 * n + 1, nv);
  Vector b(2 * n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      a(i, j) = ns.basis(i, j);
      a(i, d + j) = -ns.basis(i, j);
      a(n + i, j) = -ns.basis(i, j);
      a(n + i, d + j) = ns.basis(i, j);
    }
    a(i, 2 * d + i) = -1.0;
    a(n + i, 2 * d + i) = -1.0;
    a(2 * n, 2 * d + i) = 1.0;
  }
  b[2 * n] = 1.0;

  double best = -std::numeric_limits<double>::infinity();
  auto support = first_combination(k);
  Vector c(nv);
  do {
    // s and -s give mirrored LPs, so the first sign is fixed to +1.
    for (std::uint64_t mask = 0; mask < signs; ++mask) {
      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t t = 0; t < k; ++t) {
        const double s = (t == 0 || !((mask >> (t - 1)) & 1u)) ? 1.0 : -1.0;
        for (std::size_t j = 0; j < d; ++j) {
          c[j] += s * ns.basis(support[t], j);
          c[d + j] -= s * ns.basis(support[t], j);
        }
      }
      const LpResult lp = solve_lp(a, b, c);
      if (lp.status != LpStatus::Optimal)
        throw NumericalError("nsp_margin_vector: inner LP did not reach optimality");
      const double margin = 2.0 * lp.objective - 1.0;
      if (margin > best) {
        best = margin;
        Vector coords(d);
        for (std::size_t j = 0; j < d; ++j) coords[j] = lp.x[j] - lp.x[d + j];
        Vector w = ns.basis * coords;
        const double w1 = l1(w);
        cert.witness = Matrix::from_column(w1 > 0.0 ? (1.0 / w1) * w : w);
      }
    }
  } while (next_combination(support, n));
  cert.value = best;
  return cert;
}

}  // namespace rankrec
