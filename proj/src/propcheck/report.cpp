#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rankrec/propcheck.hpp"

namespace rankrec {

using Json = nlohmann::ordered_json;

double Inequality::magnitude() const {
  return std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

bool Inequality::holds(double tol) const {
  return slack() >= -tol * magnitude();
}

const Matrix& Witness::matrix(const std::string& name) const {
  const auto it = matrices.find(name);
  if (it == matrices.end()) throw ArgumentError("witness has no matrix \"" + name + "\"");
  return it->second;
}

double Witness::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) throw ArgumentError("witness has no parameter \"" + name + "\"");
  return it->second;
}

namespace {

Json witness_json(const Witness& w) {
  Json out;
  out["matrices"] = Json::object();
  for (const auto& [name, m] : w.matrices) out["matrices"][name] = format_matrix(m);
  out["params"] = Json::object();
  for (const auto& [name, v] : w.params) out["params"][name] = v;
  return out;
}

Witness witness_from_json(const Json& j) {
  Witness w;
  for (const auto& [name, text] : j.at("matrices").items())
    w.matrices.emplace(name, parse_matrix(text.get<std::string>()));
  for (const auto& [name, v] : j.at("params").items()) w.params.emplace(name, v.get<double>());
  return w;
}

// Orders witnesses of equal slack so the kept one does not depend on the
// order instances were seen in.
bool witness_before(const Witness& a, const Witness& b) {
  return witness_json(a).dump() < witness_json(b).dump();
}

}  // namespace

void PropertyReport::record(const Inequality& q, const std::function<Witness()>& make_witness) {
  ++instances;
  double s = q.slack();
  if (std::isnan(s)) s = std::numeric_limits<double>::lowest();
  if (s == std::numeric_limits<double>::lowest() || !q.holds(tolerance)) ++failures;
  if (s < worst_slack) {
    worst_slack = s;
    witness = make_witness();
  } else if (s == worst_slack) {
    Witness w = make_witness();
    if (witness_before(w, witness)) witness = std::move(w);
  }
}

PropertyReport merge(const PropertyReport& a, const PropertyReport& b) {
  if (a.property != b.property)
    throw ArgumentError("merge: reports for different properties (" + a.property + ", " +
                        b.property + ")");
  PropertyReport out = a;
  out.instances += b.instances;
  out.failures += b.failures;
  out.skipped += b.skipped;
  out.seed = std::min(a.seed, b.seed);
  out.tolerance = std::max(a.tolerance, b.tolerance);
  out.gating = a.gating && b.gating;
  if (b.worst_slack < a.worst_slack ||
      (b.worst_slack == a.worst_slack && witness_before(b.witness, a.witness))) {
    out.worst_slack = b.worst_slack;
    out.witness = b.witness;
  }
  return out;
}

std::string to_json(const PropertyReport& r) {
  Json j;
  j["property"] = r.property;
  j["instances"] = r.instances;
  j["failures"] = r.failures;
  j["skipped"] = r.skipped;
  if (std::isfinite(r.worst_slack))
    j["worst_slack"] = r.worst_slack;
  else
    j["worst_slack"] = nullptr;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  j["gating"] = r.gating;
  j["witness"] = witness_json(r.witness);
  return j.dump(2);
}

PropertyReport report_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  PropertyReport r;
  r.property = j.at("property").get<std::string>();
  r.instances = j.at("instances").get<std::size_t>();
  r.failures = j.at("failures").get<std::size_t>();
  r.skipped = j.at("skipped").get<std::size_t>();
  r.worst_slack = j.at("worst_slack").is_null() ? std::numeric_limits<double>::infinity()
                                                : j.at("worst_slack").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.tolerance = j.at("tolerance").get<double>();
  r.gating = j.at("gating").get<bool>();
  r.witness = witness_from_json(j.at("witness"));
  if (r.failures + r.skipped > r.instances)
    throw ArgumentError("report: failures and skips exceed the instance count");
  return r;
}

std::string to_csv(const std::vector<PropertyReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "property,instances,failures,skipped,worst_slack,seed\n";
  for (const auto& r : reports) {
    out << r.property << ',' << r.instances << ',' << r.failures << ',' << r.skipped << ',';
    if (std::isfinite(r.worst_slack)) out << r.worst_slack;
    out << ',' << r.seed << '\n';
  }
  return out.str();
}

std::vector<PropertyReport> reports_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::vector<PropertyReport> out;
  bool header = false;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "property,instances,failures,skipped,worst_slack,seed")
        throw ArgumentError("report CSV: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    const std::string where = "report CSV line " + std::to_string(lineno);
    if (f.size() != 6) throw ArgumentError(where + ": expected 6 fields");
    PropertyReport r;
    try {
      r.property = f[0];
      r.instances = std::stoull(f[1]);
      r.failures = std::stoull(f[2]);
      r.skipped = std::stoull(f[3]);
      if (!f[4].empty()) r.worst_slack = std::stod(f[4]);
      r.seed = std::stoull(f[5]);
    } catch (const std::logic_error& e) {
      throw ArgumentError(where + ": " + e.what());
    }
    if (r.failures + r.skipped > r.instances)
      throw ArgumentError(where + ": failures and skips exceed the instance count");
    out.push_back(std::move(r));
  }
  if (!header) throw ArgumentError("report CSV: missing header");
  return out;
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::Smoke: return "smoke";
    case Suite::Standard: return "standard";
    case Suite::Deep: return "deep";
  }
  return "smoke";
}

Suite suite_from_string(const std::string& s) {
  if (s == "smoke") return Suite::Smoke;
  if (s == "standard") return Suite::Standard;
  if (s == "deep") return Suite::Deep;
  throw ArgumentError("unknown suite \"" + s + "\" (expected smoke, standard or deep)");
}

std::size_t suite_instances(Suite s) {
  switch (s) {
    case Suite::Smoke: return 100;
    case Suite::Standard: return 10'000;
    case Suite::Deep: return 1'000'000;
  }
  return 100;
}

}  // namespace rankrec
