#include <algorithm>
#include <cmath>
#include <numbers>

#include "rankrec/conditions.hpp"
#include "rankrec/propcheck.hpp"
#include "rankrec/random.hpp"
#include "rankrec/solvers.hpp"

namespace rankrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sum(const Vector& v, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < std::min(to, v.size()); ++i) s += v[i];
  return s;
}

double schatten(const Matrix& x, double p, double reference) {
  const Vector s = powered_spectrum(x, p, reference);
  return sum(s, 0, s.size());
}

double tail_nuclear(const Matrix& x, std::size_t k) { return nuclear(x - top_k_matrix(x, k)); }

Witness operator_witness(const MeasurementOperator& op) {
  Witness w;
  w.matrices["A"] = op.coefficients();
  w.params["n1"] = double(op.n1());
  w.params["n2"] = double(op.n2());
  return w;
}

MeasurementOperator operator_from(const Witness& w) {
  return MeasurementOperator::matrix_map(w.matrix("A"), std::size_t(w.param("n1")),
                                         std::size_t(w.param("n2")));
}

Matrix rank_k_signal(std::size_t n1, std::size_t n2, std::size_t k, Rng& rng) {
  if (k == 0) return Matrix(n1, n2);
  Matrix x = rng.gaussian_matrix(n1, k) * rng.gaussian_matrix(k, n2);
  return (1.0 / frobenius(x)) * x;
}

// Close enough to the planted signal in objective and feasibility for the
// "as good as" hypotheses; solver outputs are only accurate to ~1e-6.
bool as_good_as_loose(const MeasurementOperator& op, const Vector& y, double eps, const Matrix& x,
                      const Matrix& x0) {
  const double scale = std::max(1.0, l2(y));
  return l2(op.apply(x) - y) <= eps + 1e-6 * scale &&
         nuclear(x) <= nuclear(x0) + 1e-6 * std::max(1.0, nuclear(x0));
}

// ---------------------------------------------------------------------------
// Main theorem instance

Inequality main_theorem_instance(const MeasurementOperator& op, const UnitaryPair& pair,
                                 std::size_t k, const Matrix& probes,
                                 std::optional<double> operator_ric, const Matrix* target) {
  const RestrictionMatrix r = restrict(op, pair);
  double worst = 0.0;
  auto spectrum_error = [&](const Vector& x) {
    const Vector sv = singular_values(pair.lift(x));
    const Vector sa = sorted_abs(x);
    double e = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) e = std::max(e, std::abs(sv[i] - sa[i]));
    return e / std::max(1.0, sa.empty() ? 0.0 : sa[0]);
  };
  for (std::size_t j = 0; j < probes.cols(); ++j) {
    const Vector x = probes.col(j);
    const Vector direct = op.apply(pair.lift(x));
    worst = std::max(worst, l2(r.apply(x) - direct) / std::max(1.0, l2(direct)) / 1e-10);
    worst = std::max(worst, spectrum_error(x) / 1e-10);
  }
  const Matrix kernel = nullspace(r.matrix);
  for (std::size_t j = 0; j < kernel.cols(); ++j) {
    const Vector w = kernel.col(j);
    worst = std::max(worst, l2(op.apply(pair.lift(w))) / 1e-9);
    worst = std::max(worst, spectrum_error(w) / 1e-10);
  }
  if (target) {
    // The pair came from the SVD of `target`; its singular values lift back to it.
    const Vector sigma = singular_values(*target);
    worst = std::max(worst, frobenius(pair.lift(sigma) - *target) /
                                std::max(1.0, frobenius(*target)) / 1e-10);
  }
  if (operator_ric) {
    const double delta = ric_exact(r.matrix, k).value;
    worst = std::max(worst, 1.0 + (delta - *operator_ric) / (1e-9 * std::max(1.0, *operator_ric)));
  }
  return {worst, 1.0};
}

// ---------------------------------------------------------------------------
// Robustness lemmas

SpectralObjective nuclear_robustness_objective(std::size_t k, double c) {
  const double rho = (c - 1.0) / (c + 1.0);
  return [k, rho](const Vector& sigma, Vector* grad) {
    const std::size_t r = sigma.size();
    const double floor = r > 0 ? tolerances().rank_relative * sigma[0] : 0.0;
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      if (sigma[i] <= floor) continue;
      (i < k ? head : tail) += sigma[i];
    }
    const double total = head + tail;
    if (grad) *grad = Vector(r);
    if (total <= 0.0) return -1.0;
    const double f = (head - rho * tail) / total;
    if (grad)
      for (std::size_t i = 0; i < r; ++i)
        if (sigma[i] > floor) (*grad)[i] = ((i < k ? 1.0 : -rho) - f) / total;
    return f;
  };
}

SpectralObjective frobenius_robustness_objective(std::size_t k, double c) {
  const double scaled = 2.0 * std::sqrt(double(k)) / c;
  return [k, scaled](const Vector& sigma, Vector* grad) {
    const std::size_t r = sigma.size();
    double diff = 0.0, nrm2 = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      diff += i < k ? sigma[i] : -sigma[i];
      nrm2 += sigma[i] * sigma[i];
    }
    if (grad) *grad = Vector(r);
    if (nrm2 <= 0.0) return -1.0;
    const double nrm = std::sqrt(nrm2);
    if (grad)
      for (std::size_t i = 0; i < r; ++i)
        (*grad)[i] = (i < k ? 1.0 : -1.0) / nrm - diff * sigma[i] / (nrm2 * nrm);
    return diff / nrm + scaled;
  };
}

Matrix project_to_cone(const Matrix& w, std::size_t k) {
  const SvdResult s = svd(w);
  const double head = sum(s.sigma, 0, k);
  const double tail = sum(s.sigma, k, s.sigma.size());
  if (tail <= head) return w;
  Vector sigma = s.sigma;
  for (std::size_t i = k; i < sigma.size(); ++i) sigma[i] *= head / tail;
  Matrix out(w.rows(), w.cols());
  for (std::size_t t = 0; t < sigma.size(); ++t)
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) += sigma[t] * s.U(i, t) * s.V(j, t);
  return out;
}

struct ConeSearch {
  double ratio = kInf;
  Matrix witness;
};

// min ||A(W)|| / ||W||_F over sampled W with ||W^k||_* >= ||W - W^k||_*.
ConeSearch minimize_ratio_over_cone(const MeasurementOperator& op, std::size_t k,
                                    std::size_t samples, std::uint64_t seed) {
  const std::size_t n1 = op.n1();
  const std::size_t n2 = op.n2();
  const Matrix& a = op.coefficients();
  auto ratio = [&](const Matrix& w) { return l2(op.apply(w)) / frobenius(w); };
  ConeSearch best;
  auto offer = [&](const Matrix& w) {
    const double nw = frobenius(w);
    if (nw == 0.0) return;
    const double r = ratio(w);
    if (r < best.ratio) {
      best.ratio = r;
      best.witness = (1.0 / nw) * w;
    }
  };

  const NullspaceBasis ns = NullspaceBasis::of(op);
  if (ns.dim() > 0) {
    KernelSearchOptions ko;
    ko.samples = samples;
    ko.restarts = std::min<std::size_t>(samples, 20);
    ko.seed = seed;
    const KernelSearchResult kr = maximize_over_kernel(ns, nuclear_nsp_objective(k), ko);
    if (kr.value >= 0.0) offer(kr.witness);
  }

  Rng rng(seed);
  std::vector<Matrix> starts;
  // Right singular vectors of the coefficient matrix with the smallest gains.
  const SvdResult sa = svd(a.transpose());
  for (std::size_t j = sa.sigma.size(); j-- > 0 && starts.size() < 4;)
    starts.push_back(project_to_cone(Matrix::unvec(sa.U.col(j), n1, n2), k));
  for (std::size_t i = 0; i < samples; ++i) starts.push_back(rank_k_signal(n1, n2, std::max<std::size_t>(k, 1), rng));
  std::sort(starts.begin(), starts.end(),
            [&](const Matrix& x, const Matrix& y) { return ratio(x) < ratio(y); });
  starts.resize(std::min<std::size_t>(starts.size(), 10));

  for (Matrix w : starts) {
    w *= 1.0 / frobenius(w);
    double r = ratio(w);
    double step = 0.1;
    for (int it = 0; it < 200 && step > 1e-12; ++it) {
      const Vector aw = a * w.vec();
      Vector g = transpose_times(a, aw);
      g -= (r * r) * w.vec();
      Matrix cand = project_to_cone(w - step * Matrix::unvec(g, n1, n2), k);
      const double nc = frobenius(cand);
      if (nc == 0.0) {
        step *= 0.5;
        continue;
      }
      cand *= 1.0 / nc;
      const double rc = ratio(cand);
      if (rc < r) {
        w = cand;
        r = rc;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    offer(w);
  }
  return best;
}

struct ConverseInstance {
  Matrix x0;
  Matrix xstar;
  double epsilon = 0.0;
  Inequality q;
};

// Builds the bound-violating instance from a nullspace-side witness W and
// checks it: the claimed violation err >= bound is the asserted inequality.
ConverseInstance converse_instance(RobustnessLemma lemma, const MeasurementOperator& op,
                                   const Matrix& w, std::size_t k, double c) {
  ConverseInstance out;
  const Matrix head = top_k_matrix(w, k);
  const Matrix rest = w - head;
  Vector y;
  if (lemma == RobustnessLemma::Noise) {
    out.x0 = -1.0 * head;
    const Vector z = 0.5 * op.apply(w);
    out.epsilon = l2(z);
    y = op.apply(out.x0) + z;
  } else {
    const double h = nuclear(head);
    const double t = nuclear(rest);
    const double beta = t > 0.0 ? std::max(0.0, (t - h) / (2.0 * t)) : 0.0;
    out.x0 = -1.0 * (head + beta * rest);
    y = op.apply(out.x0);
  }
  out.xstar = out.x0 + w;
  const double scale = std::max(1.0, l2(y));
  const bool feasible = l2(op.apply(out.xstar) - y) <= out.epsilon + 1e-9 * scale;
  const bool no_larger =
      nuclear(out.xstar) <= nuclear(out.x0) + 1e-9 * std::max(1.0, nuclear(out.x0));
  if (!feasible || !no_larger) {
    out.q = {1.0, 0.0};
    return out;
  }
  const double tail = tail_nuclear(out.x0, k);
  switch (lemma) {
    case RobustnessLemma::Nuclear:
      out.q = {2.0 * c * tail, nuclear(out.x0 - out.xstar)};
      break;
    case RobustnessLemma::Frobenius:
      out.q = {c / std::sqrt(double(k)) * tail, frobenius(out.x0 - out.xstar)};
      break;
    case RobustnessLemma::Noise:
      out.q = {c * out.epsilon, frobenius(out.x0 - out.xstar)};
      break;
  }
  return out;
}

RobustnessBound bound_for(RobustnessLemma lemma, std::size_t k, double c) {
  RobustnessBound b;
  b.k = k;
  b.constants = {c};
  b.kind = lemma == RobustnessLemma::Nuclear     ? RobustnessBound::Kind::NuclearOfTail
           : lemma == RobustnessLemma::Frobenius ? RobustnessBound::Kind::FrobeniusOfTail
                                                 : RobustnessBound::Kind::Noise;
  return b;
}

Inequality recovery_instance(RobustnessLemma lemma, const RobustnessBound& bound,
                             const Matrix& x0, const Matrix& xstar, double eps) {
  const double tail = tail_nuclear(x0, bound.k);
  const double slack = lemma == RobustnessLemma::Noise ? 0.0 : 1e-6;
  const double err =
      lemma == RobustnessLemma::Nuclear ? nuclear(x0 - xstar) : frobenius(x0 - xstar);
  return {err, bound.evaluate(tail, eps) + slack};
}

// ---------------------------------------------------------------------------
// Schatten-p theorem instances

Inequality schatten_recovery_check(const Matrix& x0, const Matrix& xstar) {
  return {frobenius(xstar - x0) / std::max(frobenius(x0), 1e-300) / 1e-4, 1.0};
}

Inequality schatten_objective_check(const Matrix& x0, const Matrix& w, double p) {
  const double ref = std::max(spectral(x0), spectral(w));
  return {schatten(x0, p, ref), schatten(x0 + w, p, ref)};
}

Inequality schatten_necessary_check(const Matrix& w, double p, std::size_t k) {
  const MeasurementOperator op = operator_with_kernel({w});
  if (l2(op.apply(w)) > 1e-9 * std::max(1.0, frobenius(w))) return {1.0, 0.0};
  const Matrix x0 = -1.0 * top_k_matrix(w, k);
  const double ref = spectral(w);
  return {schatten(x0 + w, p, ref), schatten(x0, p, ref)};
}

}  // namespace

// ---------------------------------------------------------------------------

MeasurementOperator operator_with_kernel(const std::vector<Matrix>& kernel) {
  if (kernel.empty()) throw ArgumentError("operator_with_kernel: empty kernel list");
  const std::size_t n1 = kernel[0].rows();
  const std::size_t n2 = kernel[0].cols();
  Matrix span(n1 * n2, kernel.size());
  for (std::size_t j = 0; j < kernel.size(); ++j) {
    if (kernel[j].rows() != n1 || kernel[j].cols() != n2)
      throw ArgumentError("operator_with_kernel: shape mismatch");
    span.set_col(j, kernel[j].vec());
  }
  const SvdResult s = svd(span);
  const std::size_t r = numerical_rank(s.sigma);
  const Matrix complement = orthogonal_complement(s.U.block(0, 0, n1 * n2, r));
  return MeasurementOperator::matrix_map(complement.transpose(), n1, n2);
}

PropertyReport main_theorem_experiment(const MeasurementOperator& op, std::size_t k,
                                       std::size_t pairs, std::uint64_t seed,
                                       std::optional<double> operator_ric) {
  if (!op.is_matrix_map()) throw ArgumentError("main_theorem_experiment: expected a matrix map");
  if (op.n1() > op.n2()) throw ArgumentError("main_theorem_experiment: requires n1 <= n2");
  if (k > op.n1()) throw ArgumentError("main_theorem_experiment: k exceeds n1");
  PropertyReport rep;
  rep.property = "main-theorem";
  rep.seed = seed;
  const NullspaceBasis ns = NullspaceBasis::of(op);
  for (std::size_t i = 0; i < pairs; ++i) {
    Rng rng(derive_seed(seed, i));
    UnitaryPair pair;
    std::optional<Matrix> target;
    if (i == 0 && ns.dim() > 0) {
      target = ns.element(rng.unit_vector(ns.dim()));
      const SvdResult s = svd(*target);
      pair = {s.U, s.V};
    } else {
      pair = haar_unitary_pair(op.n1(), op.n2(), rng.next_seed());
    }
    const Matrix probes = rng.gaussian_matrix(op.n1(), 5);
    const Inequality q =
        main_theorem_instance(op, pair, k, probes, operator_ric, target ? &*target : nullptr);
    rep.record(q, [&] {
      Witness w = operator_witness(op);
      w.matrices["U"] = pair.U;
      w.matrices["V"] = pair.V;
      w.matrices["probes"] = probes;
      if (target) w.matrices["target"] = *target;
      w.params["k"] = double(k);
      if (operator_ric) w.params["operator_ric"] = *operator_ric;
      w.params["instance"] = double(i);
      return w;
    });
  }
  return rep;
}

std::optional<double> ssp_operator_lower_bound(const MeasurementOperator& op,
                                               std::size_t grid_points) {
  if (!op.is_matrix_map()) throw ArgumentError("ssp_operator_lower_bound: expected a matrix map");
  if (grid_points < 2) throw ArgumentError("ssp_operator_lower_bound: grid too small");
  const NullspaceBasis ns = NullspaceBasis::of(op);
  if (ns.dim() == 0) return kInf;
  if (ns.dim() == 1) {
    const double r = nuclear(ns.element(Vector{1.0}));
    return r * r;
  }
  if (ns.dim() > 2) return std::nullopt;
  // theta -> ||cos B1 + sin B2||_* is sqrt(min(n1, n2))-Lipschitz on the
  // unit circle and pi-periodic up to sign.
  const double h = std::numbers::pi / double(grid_points);
  double lowest = kInf;
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double th = h * double(j);
    lowest = std::min(lowest, nuclear(ns.element(Vector{std::cos(th), std::sin(th)})));
  }
  const double lip = std::sqrt(double(std::min(op.n1(), op.n2())));
  const double bound = std::max(0.0, lowest - lip * h / 2.0);
  return bound * bound;
}

double ssp_recovery_constant(std::size_t k, double delta) {
  if (!(delta > 4.0 * double(k)))
    throw ArgumentError("ssp_recovery_constant: requires delta > 4k");
  return 2.0 / (1.0 - 2.0 * std::sqrt(double(k) / delta));
}

PropertyReport ssp_recovery_experiment(const MeasurementOperator& op, std::size_t k,
                                       double delta_hat, std::size_t instances,
                                       std::uint64_t seed, double tail_scale) {
  if (!op.is_matrix_map()) throw ArgumentError("ssp_recovery_experiment: expected a matrix map");
  PropertyReport rep;
  rep.property = "ssp-recovery";
  rep.seed = seed;
  if (!(delta_hat > 4.0 * double(k))) {
    for (std::size_t i = 0; i < instances; ++i) rep.skip();
    return rep;
  }
  const double c = ssp_recovery_constant(k, delta_hat);
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, i));
    Matrix x0 = rank_k_signal(op.n1(), op.n2(), k, rng);
    if (i % 5 != 0) {
      Matrix tail = rng.gaussian_matrix(op.n1(), op.n2());
      x0 += (tail_scale / frobenius(tail)) * tail;
    }
    const RecoveryProblem prob = plant(op, x0);
    const Matrix xstar = solve_nuclear(prob).estimate;
    if (!as_good_as_loose(op, prob.y, 0.0, xstar, x0)) {
      rep.skip();
      continue;
    }
    rep.record({nuclear(xstar - x0), c * tail_nuclear(x0, k) + 1e-6}, [&] {
      Witness w{{{"X0", x0}, {"Xstar", xstar}}, {{"C", c}, {"k", double(k)}}};
      w.params["instance"] = double(i);
      return w;
    });
  }
  return rep;
}

double RobustnessBound::evaluate(double tail, double epsilon) const {
  validate(*this);
  const double rk = std::sqrt(double(std::max<std::size_t>(k, 1)));
  switch (kind) {
    case Kind::L2OfTail: return constants[0] / rk * tail + constants[1] * epsilon;
    case Kind::L1OfTail: return constants[0] * tail;
    case Kind::NuclearOfTail: return 2.0 * constants[0] * tail;
    case Kind::FrobeniusOfTail: return constants[0] / rk * tail;
    case Kind::Noise: return constants[0] * epsilon;
  }
  return 0.0;
}

void validate(const RobustnessBound& b) {
  const std::size_t expected = b.kind == RobustnessBound::Kind::L2OfTail ? 2 : 1;
  if (b.constants.size() != expected)
    throw ArgumentError("robustness bound: expected " + std::to_string(expected) + " constant(s)");
  for (double c : b.constants)
    if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("robustness bound: constants must be positive");
  if (b.kind == RobustnessBound::Kind::NuclearOfTail && !(b.constants[0] > 1.0))
    throw ArgumentError("robustness bound: the nuclear-norm form requires C > 1");
  if (b.k == 0 && b.kind != RobustnessBound::Kind::Noise)
    throw ArgumentError("robustness bound: k must be positive");
}

std::string to_string(RobustnessLemma l) {
  switch (l) {
    case RobustnessLemma::Nuclear: return "nuclear";
    case RobustnessLemma::Frobenius: return "frobenius";
    case RobustnessLemma::Noise: return "noise";
  }
  return "nuclear";
}

RobustnessLemma robustness_lemma_from_string(const std::string& s) {
  if (s == "nuclear") return RobustnessLemma::Nuclear;
  if (s == "frobenius") return RobustnessLemma::Frobenius;
  if (s == "noise") return RobustnessLemma::Noise;
  throw ArgumentError("unknown robustness lemma \"" + s + "\" (expected nuclear, frobenius or noise)");
}

RobustnessReport robustness_equivalence_experiment(RobustnessLemma lemma,
                                                   const MeasurementOperator& op, std::size_t k,
                                                   double c, const RobustnessOptions& opts) {
  if (!op.is_matrix_map()) throw ArgumentError("robustness experiment: expected a matrix map");
  if (k == 0 || k > std::min(op.n1(), op.n2()))
    throw ArgumentError("robustness experiment: k out of range");
  RobustnessReport out;
  out.bound = bound_for(lemma, k, c);
  validate(out.bound);
  const std::string name = "robustness-" + to_string(lemma);

  // Nullspace side.
  if (lemma == RobustnessLemma::Noise) {
    const ConeSearch cs = minimize_ratio_over_cone(op, k, opts.search_samples, opts.seed);
    out.nullspace_value = 1.0 - 0.5 * c * cs.ratio;
    out.nullspace_witness = cs.witness;
  } else {
    const NullspaceBasis ns = NullspaceBasis::of(op);
    if (ns.dim() > 0) {
      KernelSearchOptions ko;
      ko.samples = opts.search_samples;
      ko.restarts = std::min<std::size_t>(opts.search_samples, 50);
      ko.seed = opts.seed;
      const SpectralObjective f = lemma == RobustnessLemma::Nuclear
                                      ? nuclear_robustness_objective(k, c)
                                      : frobenius_robustness_objective(k, c);
      const KernelSearchResult kr = maximize_over_kernel(ns, f, ko);
      out.nullspace_value = kr.value;
      out.nullspace_witness = kr.witness;
    }
  }
  out.nullspace_holds = out.nullspace_value < 0.0;

  // Recovery side.
  out.recovery.property = name + "-recovery";
  out.recovery.seed = opts.seed;
  for (std::size_t i = 0; i < opts.instances; ++i) {
    if (!out.nullspace_holds) {
      out.recovery.skip();
      continue;
    }
    Rng rng(derive_seed(opts.seed, i));
    Matrix x0 = rank_k_signal(op.n1(), op.n2(), k, rng);
    double eps = 0.0;
    std::optional<Vector> z;
    if (lemma == RobustnessLemma::Noise) {
      eps = opts.epsilons.empty() ? 0.0 : opts.epsilons[i % opts.epsilons.size()];
      z = eps * rng.unit_vector(op.m());
    } else {
      Matrix tail = rng.gaussian_matrix(op.n1(), op.n2());
      x0 += (opts.tail_scale / frobenius(tail)) * tail;
    }
    const RecoveryProblem prob = plant(op, x0, eps, z);
    const Matrix xstar = solve_nuclear(prob).estimate;
    if (!as_good_as_loose(op, prob.y, eps, xstar, x0)) {
      out.recovery.skip();
      continue;
    }
    out.recovery.record(recovery_instance(lemma, out.bound, x0, xstar, eps), [&] {
      Witness w{{{"X0", x0}, {"Xstar", xstar}}, {{"C", c}, {"k", double(k)}, {"epsilon", eps}}};
      w.params["instance"] = double(i);
      return w;
    });
  }

  // Converse: a violated nullspace inequality yields a violating instance.
  if (!out.nullspace_holds) {
    PropertyReport conv;
    conv.property = name + "-converse";
    conv.seed = opts.seed;
    const ConverseInstance ci = converse_instance(lemma, op, out.nullspace_witness, k, c);
    conv.record(ci.q, [&] {
      Witness w = operator_witness(op);
      w.matrices["W"] = out.nullspace_witness;
      w.matrices["X0"] = ci.x0;
      w.matrices["Xstar"] = ci.xstar;
      w.params["C"] = c;
      w.params["k"] = double(k);
      w.params["epsilon"] = ci.epsilon;
      return w;
    });
    out.converse = conv;
  }
  return out;
}

PropertyReport check_schatten_nsp_sufficient(const MeasurementOperator& op, double p,
                                             std::size_t k, const SchattenNspOptions& opts) {
  if (!op.is_matrix_map()) throw ArgumentError("check_schatten_nsp_sufficient: expected a matrix map");
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("check_schatten_nsp_sufficient: p must lie in (0, 1)");
  PropertyReport rep;
  rep.property = "schatten-nsp-sufficient";
  rep.seed = opts.seed;
  const NullspaceBasis ns = NullspaceBasis::of(op);
  bool condition = true;
  if (ns.dim() > 0) {
    const ConditionCertificate cert =
        nsp_margin_schatten_sampled(op, 2 * k, p, opts.search_samples, opts.seed);
    condition = cert.value < 0.0;
  }
  for (std::size_t i = 0; i < opts.instances; ++i) {
    if (!condition) {
      rep.skip();
      continue;
    }
    Rng rng(derive_seed(opts.seed, i));
    const Matrix x0 = rank_k_signal(op.n1(), op.n2(), k, rng);
    SolverConfig cfg;
    cfg.p = p;
    const Matrix xstar = solve_irls_schatten_p(plant(op, x0), cfg).estimate;

    Inequality worst = schatten_recovery_check(x0, xstar);
    double score = worst.slack() / worst.magnitude();
    std::optional<Matrix> worst_w;
    for (std::size_t j = 0; j < opts.kernel_samples && ns.dim() > 0; ++j) {
      const double scale = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
      const Matrix w = scale * ns.element(rng.unit_vector(ns.dim()));
      const Inequality q = schatten_objective_check(x0, w, p);
      const double s = q.slack() / q.magnitude();
      if (s < score) {
        score = s;
        worst = q;
        worst_w = w;
      }
    }
    rep.record(worst, [&] {
      Witness w{{{"X0", x0}}, {{"p", p}, {"k", double(k)}, {"instance", double(i)}}};
      if (worst_w) {
        w.matrices["W"] = *worst_w;
      } else {
        w.matrices["Xstar"] = xstar;
      }
      return w;
    });
  }
  return rep;
}

PropertyReport check_schatten_nsp_necessary(const Matrix& w, double p, std::size_t k) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("check_schatten_nsp_necessary: p must lie in (0, 1)");
  PropertyReport rep;
  rep.property = "schatten-nsp-necessary";
  const Vector sp = powered_spectrum(w, p);
  if (frobenius(w) == 0.0 || sum(sp, 0, k) <= sum(sp, k, sp.size())) {
    rep.skip();
    return rep;
  }
  rep.record(schatten_necessary_check(w, p, k), [&] {
    return Witness{{{"W", w}}, {{"p", p}, {"k", double(k)}}};
  });
  return rep;
}

// ---------------------------------------------------------------------------

double reevaluate(const PropertyReport& r) {
  const Witness& w = r.witness;
  const std::string& id = r.property;
  auto k = [&] { return static_cast<std::size_t>(w.param("k")); };
  if (id == "key-lemma") return check_key_lemma(w.matrix("X"), w.matrix("Y")).slack();
  if (id == "alignment") {
    const auto q = check_alignment_lemma(w.matrix("X0"), w.matrix("W"));
    if (!q) throw ArgumentError("reevaluate: stored alignment witness violates the precondition");
    return q->slack();
  }
  if (id == "pmaj") return check_pmaj(w.matrix("A"), w.matrix("B"), w.param("p"), k()).slack();
  if (id == "weyl")
    return check_weyl(w.matrix("A"), w.matrix("B"), std::size_t(w.param("t")),
                      std::size_t(w.param("s")))
        .slack();
  if (id == "lowertri") {
    const auto q = check_lowertri(w.matrix("A"), w.matrix("B"), w.param("p"), k());
    if (!q) throw ArgumentError("reevaluate: stored lowertri witness violates the rank bound");
    return q->slack();
  }
  if (id == "conjecture") return conjecture_gap(w.matrix("A"), w.matrix("B"), w.param("p")).slack();
  if (id == "main-theorem") {
    const MeasurementOperator op = operator_from(w);
    const UnitaryPair pair{w.matrix("U"), w.matrix("V")};
    std::optional<double> ric;
    if (w.params.count("operator_ric")) ric = w.param("operator_ric");
    const Matrix* target = w.matrices.count("target") ? &w.matrix("target") : nullptr;
    return main_theorem_instance(op, pair, k(), w.matrix("probes"), ric, target).slack();
  }
  if (id == "ssp-recovery") {
    const Matrix& x0 = w.matrix("X0");
    return Inequality{nuclear(w.matrix("Xstar") - x0), w.param("C") * tail_nuclear(x0, k()) + 1e-6}
        .slack();
  }
  for (RobustnessLemma lemma :
       {RobustnessLemma::Nuclear, RobustnessLemma::Frobenius, RobustnessLemma::Noise}) {
    const std::string base = "robustness-" + to_string(lemma);
    if (id == base + "-recovery")
      return recovery_instance(lemma, bound_for(lemma, k(), w.param("C")), w.matrix("X0"),
                               w.matrix("Xstar"), w.param("epsilon"))
          .slack();
    if (id == base + "-converse")
      return converse_instance(lemma, operator_from(w), w.matrix("W"), k(), w.param("C")).q.slack();
  }
  if (id == "schatten-nsp-sufficient") {
    if (w.matrices.count("W"))
      return schatten_objective_check(w.matrix("X0"), w.matrix("W"), w.param("p")).slack();
    return schatten_recovery_check(w.matrix("X0"), w.matrix("Xstar")).slack();
  }
  if (id == "schatten-nsp-necessary")
    return schatten_necessary_check(w.matrix("W"), w.param("p"), k()).slack();
  throw ArgumentError("reevaluate: unknown property \"" + id + "\"");
}

}  // namespace rankrec
