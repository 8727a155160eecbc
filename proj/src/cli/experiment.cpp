#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "rankrec/conditions.hpp"
#include "rankrec/experiment.hpp"
#include "rankrec/io.hpp"
#include "rankrec/random.hpp"
#include "rankrec/solvers.hpp"

namespace rankrec {

using Json = nlohmann::ordered_json;

std::string to_string(GridFamily f) {
  switch (f) {
    case GridFamily::GaussianVector: return "gaussian-vector";
    case GridFamily::GaussianMatrix: return "gaussian-matrix";
    case GridFamily::DiagonalRestricted: return "diagonal-restricted";
  }
  return "gaussian-vector";
}

GridFamily grid_family_from_string(const std::string& s) {
  for (auto f : {GridFamily::GaussianVector, GridFamily::GaussianMatrix,
                 GridFamily::DiagonalRestricted})
    if (to_string(f) == s) return f;
  throw ArgumentError("unknown instance family \"" + s +
                      "\" (expected gaussian-vector, gaussian-matrix or diagonal-restricted)");
}

void validate(const ExperimentGrid& g) {
  const bool vec = g.family == GridFamily::GaussianVector;
  if (vec && g.n == 0) throw ArgumentError("grid: gaussian-vector needs n >= 1");
  if (!vec && (g.n1 == 0 || g.n2 == 0)) throw ArgumentError("grid: matrix families need n1, n2 >= 1");
  if (g.family == GridFamily::DiagonalRestricted && g.n1 > g.n2)
    throw ArgumentError("grid: diagonal-restricted needs n1 <= n2");
  if (g.m_values.empty() || g.k_values.empty() || g.p_values.empty())
    throw ArgumentError("grid: m, k and p ranges must be nonempty");
  if (g.seeds_per_cell == 0) throw ArgumentError("grid: seeds_per_cell must be positive");
  const std::size_t kmax = vec ? g.n : std::min(g.n1, g.n2);
  for (std::size_t m : g.m_values)
    if (m == 0) throw ArgumentError("grid: m must be positive");
  for (std::size_t k : g.k_values)
    if (k > kmax)
      throw ArgumentError("grid: k = " + std::to_string(k) + " exceeds " + std::to_string(kmax));
  for (double p : g.p_values)
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("grid: every p must lie in (0, 1]");
  const std::size_t cells = g.cells();
  if (cells > g.budget / g.seeds_per_cell || cells * g.seeds_per_cell > g.budget)
    throw RefusalError("grid: " + std::to_string(cells) + " cells x " +
                       std::to_string(g.seeds_per_cell) + " seeds exceeds the budget of " +
                       std::to_string(g.budget) + " solves");
}

namespace {

std::vector<std::size_t> index_range(const Json& j, const char* name) {
  if (j.is_array()) return j.get<std::vector<std::size_t>>();
  if (!j.is_object()) throw ArgumentError(std::string("grid: ") + name + " must be a list or a range");
  const auto from = j.at("from").get<std::size_t>();
  const auto to = j.at("to").get<std::size_t>();
  const auto step = j.value("step", std::size_t{1});
  if (step == 0) throw ArgumentError(std::string("grid: ") + name + " step must be positive");
  std::vector<std::size_t> out;
  for (std::size_t v = from; v <= to; v += step) out.push_back(v);
  return out;
}

}  // namespace

ExperimentGrid grid_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ArgumentError(std::string("grid: malformed JSON (") + e.what() + ")");
  }
  ExperimentGrid g;
  try {
    g.family = grid_family_from_string(j.at("family").get<std::string>());
    if (g.family == GridFamily::GaussianVector) {
      g.n = j.at("n").get<std::size_t>();
    } else {
      g.n1 = j.at("n1").get<std::size_t>();
      g.n2 = j.at("n2").get<std::size_t>();
    }
    g.m_values = index_range(j.at("m"), "m");
    g.k_values = index_range(j.at("k"), "k");
    if (j.contains("p")) g.p_values = j.at("p").get<std::vector<double>>();
    g.seeds_per_cell = j.value("seeds_per_cell", g.seeds_per_cell);
    g.budget = j.value("budget", g.budget);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("grid: ") + e.what());
  }
  validate(g);
  return g;
}

std::string to_json(const ExperimentGrid& g) {
  Json j;
  j["family"] = to_string(g.family);
  if (g.family == GridFamily::GaussianVector) {
    j["n"] = g.n;
  } else {
    j["n1"] = g.n1;
    j["n2"] = g.n2;
  }
  j["m"] = g.m_values;
  j["k"] = g.k_values;
  j["p"] = g.p_values;
  j["seeds_per_cell"] = g.seeds_per_cell;
  j["budget"] = g.budget;
  return j.dump(2);
}

namespace {

struct TrialResult {
  double relative_error;
  std::size_t iterations;
};

TrialResult run_trial(const ExperimentGrid& g, std::size_t m, std::size_t k, double p,
                      std::uint64_t seed) {
  Rng rng(seed);
  RecoveryProblem prob;
  if (g.family == GridFamily::GaussianVector) {
    const Matrix a = (1.0 / std::sqrt(double(m))) * rng.gaussian_matrix(m, g.n);
    prob = plant(MeasurementOperator::vector_map(a), Matrix::from_column(rng.sparse_vector(g.n, k)));
  } else {
    const Matrix a = (1.0 / std::sqrt(double(m))) * rng.gaussian_matrix(m, g.n1 * g.n2);
    const auto op = MeasurementOperator::matrix_map(a, g.n1, g.n2);
    Matrix x0(g.n1, g.n2);
    if (g.family == GridFamily::GaussianMatrix) {
      if (k > 0) x0 = rng.gaussian_matrix(g.n1, k) * rng.gaussian_matrix(k, g.n2);
    } else {
      x0 = haar_unitary_pair(g.n1, g.n2, rng.next_seed()).lift(rng.sparse_vector(g.n1, k));
    }
    prob = plant(op, x0);
  }
  prob.seed = seed;
  SolverConfig cfg;
  cfg.seed = seed;
  cfg.p = p;
  RecoverySolution sol;
  if (p == 1.0)
    sol = prob.is_matrix() ? solve_nuclear(prob, cfg) : solve_l1(prob, cfg);
  else
    sol = prob.is_matrix() ? solve_irls_schatten_p(prob, cfg) : solve_irls_lp(prob, cfg);
  return {relative_error(sol.estimate, *prob.x0), sol.iterations};
}

}  // namespace

std::vector<PhaseTransitionRow> phase_transition(const ExperimentGrid& g, std::uint64_t seed) {
  validate(g);
  std::vector<PhaseTransitionRow> rows;
  std::size_t cell = 0;
  for (std::size_t m : g.m_values)
    for (std::size_t k : g.k_values) {
      // Shared by every p, so exponents are compared on the same instances.
      const std::uint64_t cell_seed = derive_seed(seed, cell++);
      for (double p : g.p_values) {
        PhaseTransitionRow row{g.family, m, k, p};
        double err_sum = 0.0, iter_sum = 0.0;
        for (std::size_t t = 0; t < g.seeds_per_cell; ++t) {
          const TrialResult r = run_trial(g, m, k, p, derive_seed(cell_seed, t));
          ++row.trials;
          if (r.relative_error < kRecoverySuccess) ++row.successes;
          err_sum += r.relative_error;
          iter_sum += double(r.iterations);
        }
        row.success_rate = double(row.successes) / double(row.trials);
        row.mean_relative_error = err_sum / double(row.trials);
        row.mean_iterations = iter_sum / double(row.trials);
        rows.push_back(row);
      }
    }
  return rows;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kCsvHeader =
    "family,m,k,p,trials,successes,success_rate,mean_relative_error,mean_iterations,seed";

}  // namespace

std::string to_csv(const std::vector<PhaseTransitionRow>& rows, std::uint64_t seed) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : rows)
    out << to_string(r.family) << ',' << r.m << ',' << r.k << ',' << number(r.p) << ','
        << r.trials << ',' << r.successes << ',' << number(r.success_rate) << ','
        << number(r.mean_relative_error) << ',' << number(r.mean_iterations) << ',' << seed
        << '\n';
  return out.str();
}

std::vector<PhaseTransitionRow> phase_transition_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<PhaseTransitionRow> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kCsvHeader) throw ArgumentError("phase-transition CSV: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    const std::string where = "phase-transition CSV line " + std::to_string(lineno);
    if (f.size() != 10) throw ArgumentError(where + ": expected 10 fields");
    PhaseTransitionRow r;
    try {
      r.family = grid_family_from_string(f[0]);
      r.m = std::stoull(f[1]);
      r.k = std::stoull(f[2]);
      r.p = std::stod(f[3]);
      r.trials = std::stoull(f[4]);
      r.successes = std::stoull(f[5]);
      r.success_rate = std::stod(f[6]);
      r.mean_relative_error = std::stod(f[7]);
      r.mean_iterations = std::stod(f[8]);
      (void)std::stoull(f[9]);
    } catch (const std::logic_error& e) {
      throw ArgumentError(where + ": " + e.what());
    }
    if (r.trials == 0 || r.successes > r.trials ||
        r.success_rate != double(r.successes) / double(r.trials))
      throw ArgumentError(where + ": inconsistent success counts");
    rows.push_back(r);
  }
  if (!header) throw ArgumentError("phase-transition CSV: missing header");
  return rows;
}

}  // namespace rankrec
