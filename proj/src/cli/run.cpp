#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankrec/cli.hpp"
#include "rankrec/conditions.hpp"
#include "rankrec/experiment.hpp"
#include "rankrec/io.hpp"
#include "rankrec/propcheck.hpp"
#include "rankrec/random.hpp"
#include "rankrec/solvers.hpp"

namespace rankrec::cli {

using Json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
// Stream index for operators generated from the run seed.
constexpr std::uint64_t kOperatorStream = 0x6f70;

struct Options {
  std::uint64_t seed = 0;
  std::string out_path;
  std::string suite = "smoke";
  double tol = 1e-9;
  std::string format;

  std::string matrix_path;
  std::string basis_path;
  std::string problem_path;
  std::string grid_path;
  std::string operator_path;
  std::string witness_path;
  std::vector<std::string> kernel_paths;
  std::string generate;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t m = 0;
  std::size_t kernel_dim = 1;

  std::size_t k = 1;
  std::size_t k2 = 0;
  double p = kUnset;
  std::vector<double> ps{0.25, 0.5, 0.75, 1.0};
  std::size_t samples = 200;
  std::size_t pairs = 200;
  std::size_t instances = 0;
  std::size_t first = 0;
  std::size_t max_rows = 8;
  std::size_t max_cols = 12;
  std::size_t kernel_samples = 1000;
  double threshold = kUnset;
  double c = 20.0;
  std::string lemma;
  std::vector<double> epsilons{0.01, 0.1, 1.0};
  double delta = kUnset;
  double operator_ric = kUnset;

  std::size_t max_iterations = 0;
  double rho = kUnset;
  bool no_polish = false;
};

struct Context {
  Options o;
  const CLI::App* leaf = nullptr;
  std::ostream& out;
  std::ostream& err;

  bool tol_given = false;

  bool given(const std::string& name) const {
    const CLI::Option* opt = leaf->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  }

  std::string format() const {
    if (!o.format.empty()) return o.format;
    const std::string& p = o.out_path;
    return p.size() >= 4 && p.compare(p.size() - 4, 4, ".csv") == 0 ? "csv" : "json";
  }

  /// Experiment sizes: base, 10 x base and 100 x base for the three suites.
  std::size_t scaled(std::size_t base) const {
    if (given("--instances")) return o.instances;
    switch (suite_from_string(o.suite)) {
      case Suite::Smoke: return base;
      case Suite::Standard: return 10 * base;
      case Suite::Deep: return 100 * base;
    }
    return base;
  }
};

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string stamped_json(const std::string& doc, const Json& parameters = nullptr) {
  const Json body = Json::parse(doc);
  Json out;
  out["generated"] = timestamp();
  for (const auto& [key, value] : body.items()) out[key] = value;
  if (!parameters.is_null()) out["parameters"] = parameters;
  return out.dump(2) + "\n";
}

std::string stamped_csv(const std::string& csv) { return "# generated " + timestamp() + "\n" + csv; }

void emit(Context& c, const std::string& contents) {
  if (c.o.out_path.empty())
    c.out << contents;
  else
    write_file_atomic(c.o.out_path, contents);
}

void note(Context& c, const std::string& line) {
  if (!c.o.out_path.empty()) c.out << line << '\n';
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Matrix load_matrix(const std::string& path) {
  try {
    return parse_matrix(read_text_file(path));
  } catch (const ArgumentError& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0) throw;
    throw ArgumentError(path + ": " + what);
  }
}

template <typename Fn>
auto load_document(const std::string& path, Fn&& parse) {
  const std::string text = read_text_file(path);
  try {
    return parse(text);
  } catch (const ArgumentError& e) {
    throw ArgumentError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Operators for the check commands

struct OperatorDefaults {
  std::string generate;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t kernel_dim = 1;
};

MeasurementOperator orthogonal_kernel_operator(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || d >= n * n) throw UsageError("--kernel-dim must lie in [1, n1 * n2)");
  Rng rng(seed);
  std::vector<Matrix> kernel;
  for (std::size_t j = 0; j < d; ++j) kernel.push_back(qr(rng.gaussian_matrix(n, n), true).Q);
  const MeasurementOperator base = operator_with_kernel(kernel);
  const Matrix mix = rng.gaussian_matrix(base.m(), base.m());
  return MeasurementOperator::matrix_map(mix * base.coefficients(), n, n);
}

MeasurementOperator check_operator(Context& c, const OperatorDefaults& def, Json& params) {
  const Options& o = c.o;
  if (!o.operator_path.empty()) {
    if (o.n1 == 0 || o.n2 == 0) throw UsageError("--operator needs --n1 and --n2");
    const Matrix a = load_matrix(o.operator_path);
    if (a.cols() != o.n1 * o.n2)
      throw ArgumentError(o.operator_path + ": operator has " + std::to_string(a.cols()) +
                          " columns but n1 * n2 = " + std::to_string(o.n1 * o.n2));
    params["operator"] = {{"source", o.operator_path}, {"n1", o.n1}, {"n2", o.n2}};
    return MeasurementOperator::matrix_map(a, o.n1, o.n2);
  }
  if (!o.kernel_paths.empty()) {
    std::vector<Matrix> kernel;
    for (const auto& path : o.kernel_paths) kernel.push_back(load_matrix(path));
    params["operator"] = {{"source", "kernel"}, {"kernel", o.kernel_paths}};
    return operator_with_kernel(kernel);
  }
  const std::string gen = o.generate.empty() ? def.generate : o.generate;
  const std::size_t n1 = c.given("--n1") ? o.n1 : def.n;
  const std::size_t n2 = c.given("--n2") ? o.n2 : def.n;
  if (n1 == 0 || n2 == 0) throw UsageError("--n1 and --n2 must be positive");
  const std::uint64_t seed = derive_seed(o.seed, kOperatorStream);
  if (gen == "gaussian") {
    const std::size_t m = c.given("--m") ? o.m : def.m;
    if (m == 0) throw UsageError("--m must be positive");
    Rng rng(seed);
    params["operator"] = {{"source", gen}, {"n1", n1}, {"n2", n2}, {"m", m}};
    return MeasurementOperator::matrix_map(
        (1.0 / std::sqrt(double(m))) * rng.gaussian_matrix(m, n1 * n2), n1, n2);
  }
  if (n1 != n2) throw UsageError("--generate orthogonal-kernel needs n1 = n2");
  const std::size_t d = c.given("--kernel-dim") ? o.kernel_dim : def.kernel_dim;
  params["operator"] = {{"source", gen}, {"n", n1}, {"kernel_dim", d}};
  return orthogonal_kernel_operator(n1, d, seed);
}

// ---------------------------------------------------------------------------

int finish(Context& c, const PropertyReport& r, const Json& params) {
  emit(c, c.format() == "csv" ? stamped_csv(to_csv({r})) : stamped_json(to_json(r), params));
  note(c, r.property + ": " + std::to_string(r.instances) + " instances, " +
              std::to_string(r.failures) + " failures, " + std::to_string(r.skipped) +
              " skipped, worst slack " + fmt(r.worst_slack));
  return r.passed() ? kExitOk : kExitFailed;
}

void require_json(Context& c) {
  if (c.format() != "json") throw UsageError("this command writes JSON only");
}

int certify(Context& c, const std::string& sub) {
  require_json(c);
  const Options& o = c.o;
  ConditionCertificate cert;
  bool pass = true;
  if (sub == "ssp") {
    if (o.matrix_path.empty() == o.basis_path.empty())
      throw UsageError("give exactly one of --matrix and --basis");
    const NullspaceBasis ns =
        o.basis_path.empty()
            ? NullspaceBasis::of(MeasurementOperator::vector_map(load_matrix(o.matrix_path)))
            : NullspaceBasis::from_span(load_matrix(o.basis_path));
    cert = ssp_exact(ns);
    if (!std::isnan(o.threshold)) pass = cert.value > o.threshold;
  } else {
    const Matrix a = load_matrix(o.matrix_path);
    const bool matrix_map = c.given("--n1") || c.given("--n2");
    auto as_operator = [&] {
      if (o.n1 * o.n2 != a.cols())
        throw ArgumentError(o.matrix_path + ": operator has " + std::to_string(a.cols()) +
                            " columns but n1 * n2 = " + std::to_string(o.n1 * o.n2));
      return MeasurementOperator::matrix_map(a, o.n1, o.n2);
    };
    if (sub == "ric") {
      cert = matrix_map ? ric_operator_sampled(as_operator(), o.k, o.pairs, o.seed) : ric_exact(a, o.k);
      if (!std::isnan(o.threshold)) pass = cert.value < o.threshold;
    } else if (sub == "roc") {
      cert = roc_exact(a, o.k, c.given("--k2") ? o.k2 : o.k);
      if (!std::isnan(o.threshold)) pass = cert.value < o.threshold;
    } else if (sub == "nsp-vector") {
      cert = nsp_margin_vector(NullspaceBasis::of(MeasurementOperator::vector_map(a)), o.k);
      pass = cert.value < 0.0;
    } else {
      if (!matrix_map) throw UsageError("nsp-matrix needs --n1 and --n2");
      cert = std::isnan(o.p) ? nsp_margin_matrix_sampled(as_operator(), o.k, o.samples, o.seed)
                             : nsp_margin_schatten_sampled(as_operator(), o.k, o.p, o.samples, o.seed);
      pass = cert.value < 0.0;
    }
  }
  cert.seed = o.seed;
  emit(c, stamped_json(to_json(cert)));
  note(c, to_string(cert.kind) + " = " + fmt(cert.value) + (cert.exact ? " (exact)" : " (sampled)"));
  return pass ? kExitOk : kExitFailed;
}

int solve(Context& c, const std::string& sub) {
  require_json(c);
  const Options& o = c.o;
  const RecoveryProblem prob = load_document(o.problem_path, problem_from_json);
  SolverConfig cfg;
  cfg.seed = o.seed;
  if (c.given("--max-iter")) cfg.max_iterations = o.max_iterations;
  if (!std::isnan(o.rho)) cfg.rho = o.rho;
  if (c.tol_given) cfg.primal_tolerance = cfg.dual_tolerance = o.tol;
  if (o.no_polish) cfg.polish = false;
  if (sub == "irls-lp" || sub == "irls-schatten") cfg.p = std::isnan(o.p) ? 0.5 : o.p;
  validate(cfg);
  RecoverySolution sol;
  if (sub == "l1") {
    if (prob.is_matrix()) throw UsageError("solve l1 needs a vector problem");
    sol = solve_l1(prob, cfg);
  } else if (sub == "nuclear") {
    if (!prob.is_matrix()) throw UsageError("solve nuclear needs a matrix problem");
    sol = solve_nuclear(prob, cfg);
  } else if (sub == "irls-lp") {
    if (prob.is_matrix()) throw UsageError("solve irls-lp needs a vector problem");
    sol = solve_irls_lp(prob, cfg);
  } else {
    if (!prob.is_matrix()) throw UsageError("solve irls-schatten needs a matrix problem");
    sol = solve_irls_schatten_p(prob, cfg);
  }
  SolutionDocument doc{sub, sol, std::nullopt, o.seed};
  if (prob.x0) doc.relative_error = relative_error(sol.estimate, *prob.x0);
  emit(c, stamped_json(to_json(doc)));
  const bool pass = sol.converged && sol.residual <= prob.epsilon + 1e-6;
  note(c, sub + ": " + std::to_string(sol.iterations) + " iterations, residual " +
              fmt(sol.residual) + (sol.converged ? "" : ", not converged"));
  return pass ? kExitOk : kExitFailed;
}

std::string bound_kind(RobustnessBound::Kind k) {
  switch (k) {
    case RobustnessBound::Kind::L2OfTail: return "l2-of-tail";
    case RobustnessBound::Kind::L1OfTail: return "l1-of-tail";
    case RobustnessBound::Kind::NuclearOfTail: return "nuclear-of-tail";
    case RobustnessBound::Kind::FrobeniusOfTail: return "frobenius-of-tail";
    case RobustnessBound::Kind::Noise: return "noise";
  }
  return "noise";
}

int check_robustness(Context& c, Json& params) {
  const Options& o = c.o;
  if (o.lemma.empty()) throw UsageError("robustness needs --lemma {nuclear|frobenius|noise}");
  const RobustnessLemma lemma = robustness_lemma_from_string(o.lemma);
  const MeasurementOperator op = check_operator(c, {"orthogonal-kernel", 4, 0, 1}, params);
  RobustnessOptions ro;
  ro.instances = c.scaled(20);
  ro.search_samples = o.samples;
  ro.epsilons = o.epsilons;
  ro.seed = o.seed;
  const RobustnessReport r = robustness_equivalence_experiment(lemma, op, o.k, o.c, ro);
  const bool pass = r.recovery.passed() && (!r.converse || r.converse->passed());
  if (c.format() == "csv") {
    std::vector<PropertyReport> rows{r.recovery};
    if (r.converse) rows.push_back(*r.converse);
    emit(c, stamped_csv(to_csv(rows)));
  } else {
    Json j;
    j["lemma"] = to_string(lemma);
    j["k"] = o.k;
    j["c"] = o.c;
    j["bound"] = {{"kind", bound_kind(r.bound.kind)}, {"constants", r.bound.constants}, {"k", r.bound.k}};
    j["nullspace"] = {{"value", std::isfinite(r.nullspace_value) ? Json(r.nullspace_value) : Json(nullptr)},
                      {"holds", r.nullspace_holds},
                      {"witness", format_matrix(r.nullspace_witness)}};
    j["recovery"] = Json::parse(to_json(r.recovery));
    j["converse"] = r.converse ? Json::parse(to_json(*r.converse)) : Json(nullptr);
    j["seed"] = o.seed;
    emit(c, stamped_json(j.dump(), params));
  }
  note(c, "robustness-" + to_string(lemma) + ": nullspace side " +
              (r.nullspace_holds ? "holds" : "fails") + ", " + std::to_string(r.recovery.failures) +
              " recovery failures" +
              (r.converse ? (r.converse->passed() ? ", violation confirmed" : ", violation not confirmed")
                          : ""));
  return pass ? kExitOk : kExitFailed;
}

int check(Context& c, const std::string& sub) {
  const Options& o = c.o;
  Json params;
  params["suite"] = o.suite;
  SweepOptions sw;
  sw.instances = c.given("--instances") ? o.instances : suite_instances(suite_from_string(o.suite));
  sw.seed = o.seed;
  sw.first = o.first;
  sw.max_rows = o.max_rows;
  sw.max_cols = o.max_cols;
  sw.tolerance = o.tol;
  if (sw.max_rows == 0 || sw.max_cols == 0) throw UsageError("--max-rows and --max-cols must be positive");
  auto sweep_params = [&] {
    params["instances"] = sw.instances;
    params["first"] = sw.first;
    params["max_rows"] = sw.max_rows;
    params["max_cols"] = sw.max_cols;
  };
  auto checked_ps = [&] {
    for (double p : o.ps)
      if (!(p > 0.0 && p <= 1.0)) throw UsageError("every --p must lie in (0, 1]");
    params["p"] = o.ps;
    return o.ps;
  };

  if (sub == "key-lemma") return sweep_params(), finish(c, sweep_key_lemma(sw), params);
  if (sub == "alignment") return sweep_params(), finish(c, sweep_alignment(sw), params);
  if (sub == "weyl") return sweep_params(), finish(c, sweep_weyl(sw), params);
  if (sub == "pmaj") return sweep_params(), finish(c, sweep_pmaj(sw, checked_ps()), params);
  if (sub == "lowertri") return sweep_params(), finish(c, sweep_lowertri(sw, checked_ps()), params);
  if (sub == "conjecture") {
    const double p = std::isnan(o.p) ? 0.5 : o.p;
    if (!(p > 0.0 && p <= 1.0)) throw UsageError("--p must lie in (0, 1]");
    sweep_params();
    params["p"] = p;
    return finish(c, scan_conjecture(p, sw), params);
  }
  if (sub == "robustness") return check_robustness(c, params);

  params["k"] = o.k;
  if (sub == "main-theorem") {
    const MeasurementOperator op = check_operator(c, {"gaussian", 3, 6, 1}, params);
    const std::size_t pairs = c.scaled(100);
    params["pairs"] = pairs;
    std::optional<double> ric;
    if (!std::isnan(o.operator_ric)) params["operator_ric"] = *(ric = o.operator_ric);
    return finish(c, main_theorem_experiment(op, o.k, pairs, o.seed, ric), params);
  }
  if (sub == "ssp-recovery") {
    const MeasurementOperator op = check_operator(c, {"orthogonal-kernel", 5, 0, 1}, params);
    std::optional<double> delta = std::nullopt;
    if (!std::isnan(o.delta)) {
      delta = o.delta;
      params["delta_source"] = "given";
    } else {
      delta = ssp_operator_lower_bound(op);
      if (!delta) throw UsageError("kernel dimension exceeds 2, so no certified bound; pass --delta");
      params["delta_source"] = "certified";
    }
    params["delta_hat"] = std::isfinite(*delta) ? Json(*delta) : Json(nullptr);
    if (*delta > 4.0 * double(o.k)) params["constant"] = ssp_recovery_constant(o.k, *delta);
    const std::size_t n = c.scaled(100);
    params["instances"] = n;
    return finish(c, ssp_recovery_experiment(op, o.k, *delta, n, o.seed), params);
  }
  // schatten-nsp
  const double p = std::isnan(o.p) ? 0.5 : o.p;
  params["p"] = p;
  if (!o.witness_path.empty()) {
    params["witness"] = o.witness_path;
    return finish(c, check_schatten_nsp_necessary(load_matrix(o.witness_path), p, o.k), params);
  }
  const MeasurementOperator op = check_operator(c, {"orthogonal-kernel", 5, 0, 1}, params);
  SchattenNspOptions so;
  so.instances = c.scaled(10);
  so.kernel_samples = o.kernel_samples;
  so.search_samples = o.samples;
  so.seed = o.seed;
  params["instances"] = so.instances;
  return finish(c, check_schatten_nsp_sufficient(op, p, o.k, so), params);
}

int experiment(Context& c) {
  if (c.format() != "csv") throw UsageError("phase-transition writes CSV only");
  const ExperimentGrid grid = load_document(c.o.grid_path, grid_from_json);
  const auto rows = phase_transition(grid, c.o.seed);
  emit(c, stamped_csv(to_csv(rows, c.o.seed)));
  note(c, "phase-transition: " + std::to_string(rows.size()) + " cells, " +
              std::to_string(grid.cells() * grid.seeds_per_cell) + " trials");
  return kExitOk;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (std::uint64_t(rd()) << 32) | rd();
}

}  // namespace

std::string strip_timestamp(const std::string& artifact) {
  std::istringstream in(artifact);
  std::ostringstream out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# generated ", 0) == 0 || line.rfind("  \"generated\": ", 0) == 0) continue;
    out << line << '\n';
  }
  return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context c{Options{}, nullptr, out, err};
  Options& o = c.o;

  CLI::App app{"Recovery conditions, solvers and property checks for sparse and low-rank recovery",
               "rankrec"};
  app.fallthrough();
  app.require_subcommand(1);
  auto* seed_opt = app.add_option("--seed", o.seed, "Seed for all randomness (default: drawn and recorded)");
  app.add_option("--out", o.out_path, "Output file, written atomically (default: stdout)");
  app.add_option("--suite", o.suite, "Instance suite")->check(CLI::IsMember({"smoke", "standard", "deep"}));
  auto* tol_opt = app.add_option("--tol", o.tol, "Inequality tolerance; solver tolerance for solve")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Output format (default: from the --out extension)")
      ->check(CLI::IsMember({"json", "csv"}));

  auto add_k = [&](CLI::App* s, const char* help = "Sparsity level or rank") {
    s->add_option("--k", o.k, help);
  };
  auto add_operator_source = [&](CLI::App* s) {
    s->add_option("--operator", o.operator_path, "Coefficient matrix of a matrix map (m x n1*n2)");
    s->add_option("--kernel", o.kernel_paths, "Matrices spanning the kernel of the operator");
    s->add_option("--generate", o.generate, "Generated operator family")
        ->check(CLI::IsMember({"gaussian", "orthogonal-kernel"}));
    s->add_option("--n1", o.n1, "Rows of the matrix domain");
    s->add_option("--n2", o.n2, "Columns of the matrix domain");
    s->add_option("--m", o.m, "Measurements of a generated Gaussian operator");
    s->add_option("--kernel-dim", o.kernel_dim, "Kernel dimension of a generated operator");
  };

  const std::map<std::string, std::string> about{
      {"ric", "Restricted isometry constant (exact, or sampled for a matrix map)"},
      {"roc", "Restricted orthogonality constant"},
      {"ssp", "Spherical section constant of a kernel"},
      {"nsp-vector", "Exact nullspace-property margin of a vector map"},
      {"nsp-matrix", "Sampled nullspace-property margin of a matrix map"},
      {"l1", "l1 minimization by ADMM"},
      {"nuclear", "Nuclear norm minimization by ADMM"},
      {"irls-lp", "Reweighted least squares for the lp quasi-norm"},
      {"irls-schatten", "Reweighted least squares for the Schatten-p quasi-norm"},
      {"key-lemma", "Singular-value difference versus nuclear norm of the difference"},
      {"alignment", "Aligned kernel witness does no worse in nuclear norm"},
      {"pmaj", "Partial sums of powered singular values of a difference"},
      {"weyl", "Weyl bounds on singular values of a sum"},
      {"lowertri", "Tail sums of powered singular values under a rank-k perturbation"},
      {"conjecture", "Powered singular-value difference bound (evidence only)"},
      {"main-theorem", "Restrictions inherit operator constants and kernels"},
      {"ssp-recovery", "Nuclear norm error bound from a spherical section constant"},
      {"robustness", "Nullspace condition versus robust recovery bound"},
      {"schatten-nsp", "Schatten-p nullspace condition and recovery"},
  };

  auto* certify_cmd = app.add_subcommand("certify", "Compute a recovery-condition certificate");
  certify_cmd->require_subcommand(1);
  for (const char* name : {"ric", "roc", "ssp", "nsp-vector", "nsp-matrix"}) {
    auto* s = certify_cmd->add_subcommand(name, about.at(name));
    auto* matrix = s->add_option("--matrix", o.matrix_path, "Measurement matrix (text format)");
    if (std::string(name) == "ssp")
      s->add_option("--basis", o.basis_path, "Matrix whose columns span the subspace");
    else
      matrix->required();
    add_k(s);
    if (std::string(name) == "roc") s->add_option("--k2", o.k2, "Second sparsity level (default: k)");
    if (std::string(name) == "ric" || std::string(name) == "nsp-matrix") {
      s->add_option("--n1", o.n1, "Treat --matrix as a matrix map on n1 x n2 matrices");
      s->add_option("--n2", o.n2);
      s->add_option("--pairs", o.pairs, "Haar pairs for the sampled operator RIC");
      s->add_option("--samples", o.samples, "Kernel samples for the sampled margin");
    }
    if (std::string(name) == "nsp-matrix") s->add_option("--p", o.p, "Schatten exponent (default: nuclear)");
    if (std::string(name) == "ric" || std::string(name) == "roc" || std::string(name) == "ssp")
      s->add_option("--threshold", o.threshold, "Fail unless the value is below (RIC, ROC) or above (SSP)");
  }

  auto* solve_cmd = app.add_subcommand("solve", "Solve a recovery problem");
  solve_cmd->require_subcommand(1);
  for (const char* name : {"l1", "nuclear", "irls-lp", "irls-schatten"}) {
    auto* s = solve_cmd->add_subcommand(name, about.at(name));
    s->add_option("--problem", o.problem_path, "Problem JSON")->required();
    s->add_option("--max-iter", o.max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
    s->add_option("--rho", o.rho, "ADMM penalty")->check(CLI::PositiveNumber);
    s->add_flag("--no-polish", o.no_polish, "Disable the least-squares refit");
    if (std::string(name).rfind("irls", 0) == 0) s->add_option("--p", o.p, "Exponent in (0, 1] (default 0.5)");
  }

  auto* check_cmd = app.add_subcommand("check", "Run a property check and write its report");
  check_cmd->require_subcommand(1);
  for (const char* name : {"key-lemma", "alignment", "pmaj", "weyl", "lowertri", "conjecture"}) {
    auto* s = check_cmd->add_subcommand(name, about.at(name));
    s->add_option("--instances", o.instances, "Override the suite size");
    s->add_option("--first", o.first, "Index of the first instance");
    s->add_option("--max-rows", o.max_rows, "Largest row count");
    s->add_option("--max-cols", o.max_cols, "Largest column count");
    if (std::string(name) == "pmaj" || std::string(name) == "lowertri")
      s->add_option("--p", o.ps, "Exponents")->delimiter(',');
    if (std::string(name) == "conjecture") s->add_option("--p", o.p, "Exponent (default 0.5)");
  }
  for (const char* name : {"main-theorem", "ssp-recovery", "robustness", "schatten-nsp"}) {
    auto* s = check_cmd->add_subcommand(name, about.at(name));
    add_operator_source(s);
    add_k(s);
    s->add_option("--instances", o.instances, "Override the suite-scaled instance count");
    const std::string n = name;
    if (n == "main-theorem") s->add_option("--operator-ric", o.operator_ric, "Operator RIC to compare against");
    if (n == "ssp-recovery") s->add_option("--delta", o.delta, "Use this spherical section constant");
    if (n == "robustness") {
      s->add_option("--lemma", o.lemma, "Which robustness lemma")
          ->check(CLI::IsMember({"nuclear", "frobenius", "noise"}));
      s->add_option("--c", o.c, "Constant C of the bound");
      s->add_option("--epsilons", o.epsilons, "Noise levels")->delimiter(',');
    }
    if (n == "robustness" || n == "schatten-nsp")
      s->add_option("--samples", o.samples, "Kernel search samples");
    if (n == "schatten-nsp") {
      s->add_option("--p", o.p, "Exponent in (0, 1) (default 0.5)");
      s->add_option("--kernel-samples", o.kernel_samples, "Kernel elements per objective check");
      s->add_option("--witness", o.witness_path, "Check the necessary direction for this kernel element");
    }
  }

  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment grid");
  exp_cmd->require_subcommand(1);
  exp_cmd->add_subcommand("phase-transition", "Recovery success rates over a grid")
      ->add_option("--grid", o.grid_path, "Grid JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const CLI::App* top = app.get_subcommands().front();
  c.leaf = top->get_subcommands().front();
  const std::string cmd = top->get_name();
  const std::string sub = c.leaf->get_name();
  const std::string where = "rankrec " + cmd + " " + sub;
  if (seed_opt->count() == 0) o.seed = entropy_seed();
  c.tol_given = tol_opt->count() > 0;

  try {
    if (cmd == "certify") return certify(c, sub);
    if (cmd == "solve") return solve(c, sub);
    if (cmd == "check") return check(c, sub);
    return experiment(c);
  } catch (const UsageError& e) {
    err << where << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const RefusalError& e) {
    err << where << ": refused: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << where << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateError& e) {
    err << where << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    const std::string what = e.what();
    err << where << ": " << what;
    if (what.find("minimum residual") == std::string::npos)
      err << " (minimum residual " << e.residual << ")";
    err << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << where << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace rankrec::cli
