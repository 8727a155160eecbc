#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rankrec/conditions.hpp"
#include "rankrec/random.hpp"

namespace rankrec {

ConditionCertificate ric_operator_sampled(const MeasurementOperator& op, std::size_t k,
                                          std::size_t pairs, std::uint64_t seed) {
  if (!op.is_matrix_map()) throw ArgumentError("ric_operator_sampled: expected a matrix map");
  if (k > op.n1()) throw ArgumentError("ric_operator_sampled: k exceeds n1");
  ConditionCertificate cert;
  cert.kind = ConditionKind::RIC;
  cert.k = k;
  cert.exact = false;
  cert.seed = seed;
  cert.witness = Matrix(op.n1(), op.n2());
  double best = -1.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const UnitaryPair pair = haar_unitary_pair(op.n1(), op.n2(), derive_seed(seed, i));
    const ConditionCertificate local = ric_exact(restrict(op, pair).matrix, k);
    cert.enumeration_size += local.enumeration_size;
    if (local.value > best) {
      best = local.value;
      cert.witness = pair.lift(local.witness.col(0));
    }
  }
  cert.value = std::max(best, 0.0);
  return cert;
}

SpectralObjective nuclear_nsp_objective(std::size_t k) {
  return schatten_nsp_objective(k, 1.0);
}

SpectralObjective schatten_nsp_objective(std::size_t k, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("schatten_nsp_objective: p must lie in (0, 1]");
  return [k, p](const Vector& sigma, Vector* grad) {
    const std::size_t r = sigma.size();
    // Singular values below the numerical-rank threshold are treated as zero;
    // for p < 1 their p-th powers would otherwise dominate rounding noise.
    const double floor = r > 0 ? tolerances().rank_relative * sigma[0] : 0.0;
    Vector pw(r);
    double head = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      pw[i] = sigma[i] > floor ? (p == 1.0 ? sigma[i] : std::pow(sigma[i], p)) : 0.0;
      total += pw[i];
      if (i < k) head += pw[i];
    }
    if (grad) *grad = Vector(r);
    if (total <= 0.0) return -1.0;
    const double f = (2.0 * head - total) / total;
    if (grad) {
      for (std::size_t i = 0; i < r; ++i) {
        if (sigma[i] <= floor) continue;
        const double dpw = p == 1.0 ? 1.0 : p * pw[i] / sigma[i];
        (*grad)[i] = dpw * ((i < k ? 1.0 : -1.0) - f) / total;
      }
    }
    return f;
  };
}

namespace {

struct Evaluation {
  double value = 0.0;
  Vector coord_grad;
};

Evaluation evaluate(const NullspaceBasis& ns, const SpectralObjective& f, const Vector& coords,
                    bool want_grad) {
  const Matrix w = ns.element(coords);
  Evaluation e;
  if (!want_grad) {
    e.value = f(singular_values(w), nullptr);
    return e;
  }
  const SvdResult s = svd(w);
  Vector g;
  e.value = f(s.sigma, &g);
  // d f / d W = U diag(g) V^T, pulled back to kernel coordinates.
  Matrix dw(w.rows(), w.cols());
  for (std::size_t t = 0; t < s.sigma.size(); ++t) {
    if (g[t] == 0.0) continue;
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) dw(i, j) += g[t] * s.U(i, t) * s.V(j, t);
  }
  e.coord_grad = transpose_times(ns.basis, dw.vec());
  return e;
}

Vector normalized(Vector v) {
  const double n = l2(v);
  if (n > 0.0) v *= 1.0 / n;
  return v;
}

}  // namespace

KernelSearchResult maximize_over_kernel(const NullspaceBasis& ns, const SpectralObjective& f,
                                        const KernelSearchOptions& opts) {
  const std::size_t d = ns.dim();
  if (d == 0) throw DegenerateError("maximize_over_kernel: the kernel is {0}");
  KernelSearchResult res;
  if (d == 1) {
    res.coords = Vector{1.0};
    res.value = evaluate(ns, f, res.coords, false).value;
    res.witness = ns.element(res.coords);
    res.evaluations = 1;
    res.exhaustive = true;
    return res;
  }

  Rng rng(opts.seed);
  struct Start {
    double value;
    std::size_t index;
  };
  std::vector<Vector> starts;
  std::vector<Start> scored;
  const std::size_t samples = std::max<std::size_t>(opts.samples, 1);
  for (std::size_t i = 0; i < samples; ++i) {
    starts.push_back(rng.unit_vector(d));
    scored.push_back({evaluate(ns, f, starts.back(), false).value, i});
    ++res.evaluations;
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Start& a, const Start& b) { return a.value > b.value; });

  res.value = -std::numeric_limits<double>::infinity();
  const std::size_t restarts = std::min(opts.restarts, scored.size());
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    Vector c = starts[scored[r].index];
    Evaluation cur = evaluate(ns, f, c, true);
    ++res.evaluations;
    double step = 1.0;
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
      Vector g = cur.coord_grad - dot(cur.coord_grad, c) * c;
      const double gn = l2(g);
      if (gn < 1e-14) break;
      g *= 1.0 / gn;
      bool moved = false;
      while (step > 1e-12) {
        Vector trial = normalized(c + step * g);
        Evaluation next = evaluate(ns, f, trial, true);
        ++res.evaluations;
        if (next.value > cur.value) {
          c = std::move(trial);
          cur = std::move(next);
          moved = true;
          step = std::min(1.0, 2.0 * step);
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (cur.value > res.value) {
      res.value = cur.value;
      res.coords = c;
    }
  }
  res.witness = ns.element(res.coords);
  const double fro = frobenius(res.witness);
  if (fro > 0.0) res.witness *= 1.0 / fro;
  return res;
}

namespace {

ConditionCertificate kernel_certificate(const MeasurementOperator& op, ConditionKind kind,
                                        std::size_t k, const SpectralObjective& f,
                                        std::size_t samples, std::uint64_t seed) {
  if (!op.is_matrix_map()) throw ArgumentError("sampled nullspace margin: expected a matrix map");
  const NullspaceBasis ns = NullspaceBasis::of(op);
  if (ns.dim() == 0) throw DegenerateError("sampled nullspace margin: the kernel is trivial");
  KernelSearchOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  const KernelSearchResult r = maximize_over_kernel(ns, f, opts);
  ConditionCertificate cert;
  cert.kind = kind;
  cert.k = k;
  cert.value = r.value;
  cert.exact = false;
  cert.witness = r.witness;
  cert.enumeration_size = r.evaluations;
  cert.seed = seed;
  return cert;
}

}  // namespace

ConditionCertificate nsp_margin_matrix_sampled(const MeasurementOperator& op, std::size_t k,
                                               std::size_t samples, std::uint64_t seed) {
  if (k > std::min(op.n1(), op.n2())) throw ArgumentError("nsp_margin_matrix_sampled: k too large");
  return kernel_certificate(op, ConditionKind::NspMatrix, k, nuclear_nsp_objective(k), samples,
                            seed);
}

ConditionCertificate nsp_margin_schatten_sampled(const MeasurementOperator& op, std::size_t k,
                                                 double p, std::size_t samples,
                                                 std::uint64_t seed) {
  if (k > std::min(op.n1(), op.n2()))
    throw ArgumentError("nsp_margin_schatten_sampled: k too large");
  ConditionCertificate cert = kernel_certificate(op, ConditionKind::NspSchattenP, k,
                                                 schatten_nsp_objective(k, p), samples, seed);
  cert.p = p;
  return cert;
}

double evaluate_witness(const ConditionCertificate& cert, const MeasurementOperator& op) {
  const Matrix& w = cert.witness;
  switch (cert.kind) {
    case ConditionKind::RIC: {
      const double nrm2 = std::pow(frobenius(w), 2);
      if (nrm2 == 0.0) return 0.0;
      const Vector aw = op.is_matrix_map() ? op.apply(w) : op.apply(w.col(0));
      return std::abs(dot(aw, aw) / nrm2 - 1.0);
    }
    case ConditionKind::ROC: {
      if (w.cols() != 2) throw ArgumentError("evaluate_witness: ROC witness must have two columns");
      const Vector x = w.col(0);
      const Vector y = w.col(1);
      const double nx = l2(x);
      const double ny = l2(y);
      if (nx == 0.0 || ny == 0.0) return 0.0;
      return std::abs(dot(op.apply(x), op.apply(y))) / (nx * ny);
    }
    case ConditionKind::SSP: {
      const Vector v = w.vec();
      return std::pow(l1(v) / l2(v), 2);
    }
    case ConditionKind::NspVector: {
      if (cert.k == 0) return -1.0;
      const Vector v = w.vec();
      const double total = l1(v);
      const double head = l1(top_k_vector(v, cert.k));
      return (2.0 * head - total) / total;
    }
    case ConditionKind::NspMatrix:
      return nuclear_nsp_objective(cert.k)(singular_values(w), nullptr);
    case ConditionKind::NspSchattenP:
      return schatten_nsp_objective(cert.k, cert.p.value_or(1.0))(singular_values(w), nullptr);
  }
  return 0.0;
}

}  // namespace rankrec
