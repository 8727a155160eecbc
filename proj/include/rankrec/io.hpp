#pragma once

// JSON documents for certificates, recovery problems and solutions. Matrices
// are embedded as strings in the matrix text format, vectors as number lists.

#include <string>

#include "rankrec/conditions.hpp"
#include "rankrec/solvers.hpp"

namespace rankrec {

/// {kind, k, k2?, p?, value, exact, enumeration_size, witness, seed?}; an
/// infinite value is written as null.
std::string to_json(const ConditionCertificate& cert);
ConditionCertificate certificate_from_json(const std::string& text);

/// {kind, m, n | [n1, n2], operator, y, epsilon, x0?, z?, seed?}. Parsing
/// validates the problem.
std::string to_json(const RecoveryProblem& prob);
RecoveryProblem problem_from_json(const std::string& text);

/// ||X - X0||_F / ||X0||_F, or ||X||_F when X0 = 0.
double relative_error(const Matrix& x, const Matrix& x0);

struct SolutionDocument {
  std::string solver;
  RecoverySolution solution;
  /// Present when the problem carries a ground truth.
  std::optional<double> relative_error;
  std::optional<std::uint64_t> seed;
};

/// {solver, estimate, objective, residual, iterations, converged, polished,
/// relative_error?, seed?}. The iteration history is not serialized.
std::string to_json(const SolutionDocument& doc);
SolutionDocument solution_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace rankrec
