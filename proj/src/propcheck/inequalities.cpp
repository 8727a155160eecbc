#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankrec/propcheck.hpp"
#include "rankrec/random.hpp"

namespace rankrec {

Vector powered_spectrum(const Matrix& x, double p, double reference) {
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("powered_spectrum: p must lie in (0, 1]");
  Vector s = singular_values(x);
  const double floor = tolerances().rank_relative * std::max(s.empty() ? 0.0 : s[0], reference);
  for (double& v : s) v = v > floor ? (p == 1.0 ? v : std::pow(v, p)) : 0.0;
  return s;
}

namespace {

double joint_scale(const Matrix& a, const Matrix& b) { return std::max(spectral(a), spectral(b)); }

}  // namespace

Inequality check_key_lemma(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw ArgumentError("check_key_lemma: shape mismatch");
  const Vector sx = singular_values(x);
  const Vector sy = singular_values(y);
  double lhs = 0.0;
  for (std::size_t i = 0; i < sx.size(); ++i) lhs += std::abs(sx[i] - sy[i]);
  return {lhs, nuclear(x - y)};
}

std::optional<Inequality> check_alignment_lemma(const Matrix& x0, const Matrix& w) {
  if (x0.rows() != w.rows() || x0.cols() != w.cols())
    throw ArgumentError("check_alignment_lemma: shape mismatch");
  if (nuclear(x0 + w) > nuclear(x0)) return std::nullopt;
  const SvdResult sw = svd(w);
  const Vector s0 = singular_values(x0);
  Matrix x1(w.rows(), w.cols());
  for (std::size_t t = 0; t < s0.size(); ++t)
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) x1(i, j) -= s0[t] * sw.U(i, t) * sw.V(j, t);
  return Inequality{nuclear(x1 + w), nuclear(x1)};
}

Inequality check_pmaj(const Matrix& a, const Matrix& b, double p, std::size_t k) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("check_pmaj: shape mismatch");
  const double ref = joint_scale(a, b);
  const Vector sa = powered_spectrum(a, p, ref);
  const Vector sb = powered_spectrum(b, p, ref);
  const Vector sd = powered_spectrum(a - b, p, ref);
  if (k < 1 || k > sa.size()) throw ArgumentError("check_pmaj: k out of range");
  Inequality q;
  for (std::size_t i = 0; i < k; ++i) {
    q.lhs += sa[i] - sb[i];
    q.rhs += sd[i];
  }
  return q;
}

Inequality check_weyl(const Matrix& a, const Matrix& b, std::size_t t, std::size_t s) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("check_weyl: shape mismatch");
  const std::size_t n = std::min(a.rows(), a.cols());
  if (t < 1 || s < 1 || t + s - 1 > n) throw ArgumentError("check_weyl: index out of range");
  const Vector sa = singular_values(a);
  const Vector sb = singular_values(b);
  const Vector sum = singular_values(a + b);
  return {sum[t + s - 2], sa[t - 1] + sb[s - 1]};
}

std::optional<Inequality> check_lowertri(const Matrix& a, const Matrix& b, double p,
                                         std::size_t k) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ArgumentError("check_lowertri: shape mismatch");
  const std::size_t n = std::min(a.rows(), a.cols());
  if (2 * k > n) throw ArgumentError("check_lowertri: 2k exceeds n");
  if (numerical_rank(singular_values(b)) > k) return std::nullopt;
  const double ref = joint_scale(a, b);
  const Vector sa = powered_spectrum(a, p, ref);
  const Vector sd = powered_spectrum(a - b, p, ref);
  Inequality q;
  for (std::size_t i = 2 * k; i < n; ++i) q.lhs += sa[i];
  for (std::size_t i = k; i < n - k; ++i) q.rhs += sd[i];
  return q;
}

Inequality conjecture_gap(const Matrix& a, const Matrix& b, double p) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ArgumentError("conjecture_gap: shape mismatch");
  const double ref = joint_scale(a, b);
  const Vector sa = powered_spectrum(a, p, ref);
  const Vector sb = powered_spectrum(b, p, ref);
  const Vector sd = powered_spectrum(a - b, p, ref);
  Inequality q;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    q.lhs += std::abs(sa[i] - sb[i]);
    q.rhs += sd[i];
  }
  return q;
}

// ---------------------------------------------------------------------------

namespace {

Matrix orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
  return qr(rng.gaussian_matrix(rows, cols)).Q;
}

Matrix with_spectrum(const Matrix& u, const Vector& sigma, const Matrix& v) {
  Matrix out(u.rows(), v.rows());
  for (std::size_t t = 0; t < sigma.size(); ++t)
    for (std::size_t i = 0; i < u.rows(); ++i)
      for (std::size_t j = 0; j < v.rows(); ++j) out(i, j) += sigma[t] * u(i, t) * v(j, t);
  return out;
}

Matrix random_rank(std::size_t rows, std::size_t cols, std::size_t rank, Rng& rng) {
  if (rank == 0) return Matrix(rows, cols);
  return rng.gaussian_matrix(rows, rank) * rng.gaussian_matrix(rank, cols);
}

double log_scale(Rng& rng) { return std::exp(rng.uniform(-3.0, 3.0)); }

}  // namespace

MatrixPair generate_pair(PairFamily family, std::size_t rows, std::size_t cols,
                         std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw ArgumentError("generate_pair: empty shape");
  Rng rng(seed);
  const std::size_t n = std::min(rows, cols);
  MatrixPair out;
  switch (family) {
    case PairFamily::Gaussian:
      out.a = log_scale(rng) * rng.gaussian_matrix(rows, cols);
      out.b = log_scale(rng) * rng.gaussian_matrix(rows, cols);
      break;
    case PairFamily::EqualSpectrum: {
      out.a = with_spectrum(orthonormal_columns(rows, n, rng), Vector(n, log_scale(rng)),
                            orthonormal_columns(cols, n, rng));
      if (rng.uniform() < 0.5)
        out.b = with_spectrum(orthonormal_columns(rows, n, rng), Vector(n, log_scale(rng)),
                              orthonormal_columns(cols, n, rng));
      else
        out.b = rng.gaussian_matrix(rows, cols);
      break;
    }
    case PairFamily::Clustered: {
      const Matrix u = orthonormal_columns(rows, n, rng);
      const Matrix v = orthonormal_columns(cols, n, rng);
      const double ca = log_scale(rng);
      const double cb = log_scale(rng);
      Vector sa(n), sb(n);
      for (std::size_t i = 0; i < n; ++i) {
        sa[i] = ca * (1.0 + 1e-8 * rng.normal());
        sb[i] = cb * (1.0 + 1e-8 * rng.normal());
      }
      // Nearly aligned singular subspaces.
      const Matrix u2 = qr(u + 1e-6 * rng.gaussian_matrix(rows, n)).Q;
      const Matrix v2 = qr(v + 1e-6 * rng.gaussian_matrix(cols, n)).Q;
      out.a = with_spectrum(u, sa, v);
      out.b = with_spectrum(u2, sb, v2);
      break;
    }
    case PairFamily::RankDeficient:
      out.a = random_rank(rows, cols, rng.index(0, n > 0 ? n - 1 : 0), rng);
      out.b = random_rank(rows, cols, rng.index(0, n > 0 ? n - 1 : 0), rng);
      break;
    case PairFamily::Aligned: {
      const Matrix u = orthonormal_columns(rows, n, rng);
      const Matrix v = orthonormal_columns(cols, n, rng);
      Vector sa(n), sb(n);
      for (std::size_t i = 0; i < n; ++i) {
        sa[i] = std::abs(rng.normal());
        sb[i] = rng.uniform() < 0.25 ? sa[i] : std::abs(rng.normal());
      }
      out.a = with_spectrum(u, sa, v);
      out.b = with_spectrum(u, sb, v);
      if (rng.uniform() < 0.5) out.b += 1e-9 * rng.gaussian_matrix(rows, cols);
      break;
    }
    case PairFamily::Truncated:
      out.a = rng.gaussian_matrix(rows, cols);
      out.b = top_k_matrix(out.a, rng.index(0, n));
      break;
  }
  return out;
}

namespace {

struct Draw {
  std::size_t index;
  MatrixPair pair;
  Rng rng;
};

template <typename Fn>
PropertyReport sweep(const std::string& name, const SweepOptions& opts, Fn&& per_instance) {
  if (opts.max_rows == 0 || opts.max_cols == 0) throw ArgumentError("sweep: empty shape bound");
  PropertyReport r;
  r.property = name;
  r.seed = opts.seed;
  r.tolerance = opts.tolerance;
  for (std::size_t i = opts.first; i < opts.first + opts.instances; ++i) {
    Rng rng(derive_seed(opts.seed, i));
    const auto family = static_cast<PairFamily>(i % kPairFamilies);
    const std::size_t rows = rng.index(1, opts.max_rows);
    const std::size_t cols = rng.index(1, opts.max_cols);
    Draw d{i, generate_pair(family, rows, cols, rng.next_seed()), Rng(rng.next_seed())};
    per_instance(r, d);
  }
  return r;
}

// The check with the most negative slack relative to its magnitude; a sweep
// instance fails iff this one does.
struct Worst {
  Inequality q;
  double score = std::numeric_limits<double>::infinity();
  std::map<std::string, double> params;

  void offer(const Inequality& c, std::map<std::string, double> p) {
    const double s = c.slack() / c.magnitude();
    if (s < score || std::isnan(s)) {
      score = std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
      q = c;
      params = std::move(p);
    }
  }
};

}  // namespace

PropertyReport sweep_key_lemma(const SweepOptions& opts) {
  return sweep("key-lemma", opts, [](PropertyReport& r, Draw& d) {
    r.record(check_key_lemma(d.pair.a, d.pair.b), [&] {
      return Witness{{{"X", d.pair.a}, {"Y", d.pair.b}}, {{"instance", double(d.index)}}};
    });
  });
}

PropertyReport sweep_alignment(const SweepOptions& opts) {
  return sweep("alignment", opts, [](PropertyReport& r, Draw& d) {
    Matrix x0 = d.pair.a;
    Matrix w;
    const double nx = std::max(frobenius(x0), 1e-300);
    const double nb = std::max(frobenius(d.pair.b), 1e-300);
    switch (d.index / kPairFamilies % 4) {
      case 0:
        w = -1.0 * x0;
        break;
      case 1: {
        const double t = d.rng.uniform(0.2, 1.8);
        w = -t * x0 + (0.1 * nx / nb) * d.pair.b;
        break;
      }
      case 2:
        w = d.pair.b;
        break;
      default:
        x0 = Matrix(x0.rows(), x0.cols());
        w = Matrix(x0.rows(), x0.cols());
        break;
    }
    const auto q = check_alignment_lemma(x0, w);
    if (!q) {
      r.skip();
      return;
    }
    r.record(*q, [&] {
      return Witness{{{"X0", x0}, {"W", w}}, {{"instance", double(d.index)}}};
    });
  });
}

PropertyReport sweep_pmaj(const SweepOptions& opts, const std::vector<double>& ps) {
  return sweep("pmaj", opts, [&ps](PropertyReport& r, Draw& d) {
    const std::size_t n = std::min(d.pair.a.rows(), d.pair.a.cols());
    Worst worst;
    for (double p : ps)
      for (std::size_t k = 1; k <= n; ++k)
        worst.offer(check_pmaj(d.pair.a, d.pair.b, p, k), {{"p", p}, {"k", double(k)}});
    r.record(worst.q, [&] {
      Witness w{{{"A", d.pair.a}, {"B", d.pair.b}}, worst.params};
      w.params["instance"] = double(d.index);
      return w;
    });
  });
}

PropertyReport sweep_weyl(const SweepOptions& opts) {
  return sweep("weyl", opts, [](PropertyReport& r, Draw& d) {
    const std::size_t n = std::min(d.pair.a.rows(), d.pair.a.cols());
    Worst worst;
    for (std::size_t t = 1; t <= n; ++t)
      for (std::size_t s = 1; t + s - 1 <= n; ++s)
        worst.offer(check_weyl(d.pair.a, d.pair.b, t, s), {{"t", double(t)}, {"s", double(s)}});
    r.record(worst.q, [&] {
      Witness w{{{"A", d.pair.a}, {"B", d.pair.b}}, worst.params};
      w.params["instance"] = double(d.index);
      return w;
    });
  });
}

PropertyReport sweep_lowertri(const SweepOptions& opts, const std::vector<double>& ps) {
  return sweep("lowertri", opts, [&ps](PropertyReport& r, Draw& d) {
    const std::size_t n = std::min(d.pair.a.rows(), d.pair.a.cols());
    Worst worst;
    std::map<std::size_t, Matrix> bs;
    for (std::size_t k = 0; 2 * k <= n; ++k) {
      // B of rank <= k: the truncation of A (the tight case) or of the partner.
      const Matrix b = k % 2 == 0 ? top_k_matrix(d.pair.a, k) : top_k_matrix(d.pair.b, k);
      for (double p : ps) {
        const auto q = check_lowertri(d.pair.a, b, p, k);
        if (q) worst.offer(*q, {{"p", p}, {"k", double(k)}});
      }
      bs.emplace(k, b);
    }
    if (!std::isfinite(worst.score) && worst.score > 0.0) {
      r.skip();
      return;
    }
    r.record(worst.q, [&] {
      const auto k = static_cast<std::size_t>(worst.params.at("k"));
      Witness w{{{"A", d.pair.a}, {"B", bs.at(k)}}, worst.params};
      w.params["instance"] = double(d.index);
      return w;
    });
  });
}

PropertyReport scan_conjecture(double p, const SweepOptions& opts) {
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("scan_conjecture: p must lie in (0, 1]");
  PropertyReport r = sweep("conjecture", opts, [p](PropertyReport& rep, Draw& d) {
    rep.record(conjecture_gap(d.pair.a, d.pair.b, p), [&] {
      return Witness{{{"A", d.pair.a}, {"B", d.pair.b}}, {{"p", p}, {"instance", double(d.index)}}};
    });
  });
  r.gating = p == 1.0;
  return r;
}

}  // namespace rankrec
