#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "rankrec/io.hpp"

namespace rankrec {

using Json = nlohmann::ordered_json;

namespace {

Json vector_json(const Vector& v) { return Json(v.values()); }

Vector vector_from(const Json& j) { return Vector(j.get<std::vector<double>>()); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json parse_document(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ArgumentError(std::string(what) + ": malformed JSON (" + e.what() + ")");
  }
}

// Key lookups raise ArgumentError naming the document and the field.
template <typename Fn>
auto field(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string to_json(const ConditionCertificate& cert) {
  Json j;
  j["kind"] = to_string(cert.kind);
  j["k"] = cert.k;
  if (cert.k2) j["k2"] = *cert.k2;
  if (cert.p) j["p"] = *cert.p;
  j["value"] = number_or_null(cert.value);
  j["exact"] = cert.exact;
  j["enumeration_size"] = cert.enumeration_size;
  j["witness"] = format_matrix(cert.witness);
  if (cert.seed) j["seed"] = *cert.seed;
  return j.dump(2);
}

ConditionCertificate certificate_from_json(const std::string& text) {
  const Json j = parse_document(text, "certificate");
  return field("certificate", [&] {
    ConditionCertificate c;
    c.kind = condition_kind_from_string(j.at("kind").get<std::string>());
    c.k = j.at("k").get<std::size_t>();
    if (j.contains("k2")) c.k2 = j.at("k2").get<std::size_t>();
    if (j.contains("p")) c.p = j.at("p").get<double>();
    c.value = j.at("value").is_null() ? std::numeric_limits<double>::infinity()
                                      : j.at("value").get<double>();
    c.exact = j.at("exact").get<bool>();
    c.enumeration_size = j.at("enumeration_size").get<std::uint64_t>();
    c.witness = parse_matrix(j.at("witness").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  });
}

std::string to_json(const RecoveryProblem& prob) {
  Json j;
  j["kind"] = prob.is_matrix() ? "matrix" : "vector";
  j["m"] = prob.op.m();
  if (prob.is_matrix())
    j["n"] = {prob.op.n1(), prob.op.n2()};
  else
    j["n"] = prob.op.n();
  j["operator"] = format_matrix(prob.op.coefficients());
  j["y"] = vector_json(prob.y);
  j["epsilon"] = prob.epsilon;
  if (prob.x0) {
    if (prob.is_matrix())
      j["x0"] = format_matrix(*prob.x0);
    else
      j["x0"] = vector_json(prob.x0->vec());
  }
  if (prob.z) j["z"] = vector_json(*prob.z);
  if (prob.seed) j["seed"] = *prob.seed;
  return j.dump(2);
}

RecoveryProblem problem_from_json(const std::string& text) {
  const Json j = parse_document(text, "problem");
  RecoveryProblem prob = field("problem", [&] {
    RecoveryProblem p;
    const std::string kind = j.at("kind").get<std::string>();
    const Matrix coeffs = parse_matrix(j.at("operator").get<std::string>());
    if (coeffs.rows() != j.at("m").get<std::size_t>())
      throw ArgumentError("problem: operator has " + std::to_string(coeffs.rows()) +
                          " rows but m = " + j.at("m").dump());
    if (kind == "matrix") {
      const auto shape = j.at("n").get<std::vector<std::size_t>>();
      if (shape.size() != 2) throw ArgumentError("problem: matrix problems need n = [n1, n2]");
      p.op = MeasurementOperator::matrix_map(coeffs, shape[0], shape[1]);
      if (j.contains("x0")) p.x0 = parse_matrix(j.at("x0").get<std::string>());
    } else if (kind == "vector") {
      if (coeffs.cols() != j.at("n").get<std::size_t>())
        throw ArgumentError("problem: operator has " + std::to_string(coeffs.cols()) +
                            " columns but n = " + j.at("n").dump());
      p.op = MeasurementOperator::vector_map(coeffs);
      if (j.contains("x0")) p.x0 = Matrix::from_column(vector_from(j.at("x0")));
    } else {
      throw ArgumentError("problem: kind must be \"vector\" or \"matrix\", got \"" + kind + "\"");
    }
    p.y = vector_from(j.at("y"));
    p.epsilon = j.at("epsilon").get<double>();
    if (j.contains("z")) p.z = vector_from(j.at("z"));
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    return p;
  });
  validate(prob);
  return prob;
}

double relative_error(const Matrix& x, const Matrix& x0) {
  const double base = frobenius(x0);
  const double err = frobenius(x - x0);
  return base > 0.0 ? err / base : err;
}

std::string to_json(const SolutionDocument& doc) {
  const RecoverySolution& s = doc.solution;
  Json j;
  j["solver"] = doc.solver;
  j["estimate"] = format_matrix(s.estimate);
  j["objective"] = s.objective;
  j["residual"] = s.residual;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["polished"] = s.polished;
  if (doc.relative_error) j["relative_error"] = *doc.relative_error;
  if (doc.seed) j["seed"] = *doc.seed;
  return j.dump(2);
}

SolutionDocument solution_from_json(const std::string& text) {
  const Json j = parse_document(text, "solution");
  return field("solution", [&] {
    SolutionDocument d;
    d.solver = j.at("solver").get<std::string>();
    d.solution.estimate = parse_matrix(j.at("estimate").get<std::string>());
    d.solution.objective = j.at("objective").get<double>();
    d.solution.residual = j.at("residual").get<double>();
    d.solution.iterations = j.at("iterations").get<std::size_t>();
    d.solution.converged = j.at("converged").get<bool>();
    d.solution.polished = j.at("polished").get<bool>();
    if (j.contains("relative_error")) d.relative_error = j.at("relative_error").get<double>();
    if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
    if (!d.solution.estimate.all_finite()) throw ArgumentError("solution: non-finite estimate");
    if (d.solution.residual < 0.0) throw ArgumentError("solution: negative residual");
    return d;
  });
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

}  // namespace rankrec
