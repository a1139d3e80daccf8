#pragma once

// Problem files, report serialization and CSV output.
//
// Problem file:
//   {"A": [["1", "-1/2"], ...], "c": ["1", ...],
//    "marginals": [{"type": "pareto", "alpha": "1"}, {"type": "constant", "value": "3/2"}]}
// Rationals are strings "p" or "p/q"; JSON integers are also accepted.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tailprod/lp_core.hpp"
#include "tailprod/marginals.hpp"
#include "tailprod/tail_analysis.hpp"
#include "tailprod/verification.hpp"

namespace tailprod {

using nlohmann::json;

/// Malformed problem file; the message names the offending field.
class ProblemFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Rational rational_field(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ProblemFormatError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return parse_rational(j.dump());
  throw ProblemFormatError(where + ": expected a rational string \"p/q\" or an integer, got " + j.dump());
}

inline json rational_list(const RationalVector& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

inline json decimal_list(const RationalVector& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

inline json extended_json(const ExtendedReal& e) {
  return {{"value", e.to_string()}, {"exact", e.is_exact()}, {"decimal", e.is_infinite() ? json("inf") : json(e.to_double())}};
}

}  // namespace detail

inline MarginalModel marginal_from_json(const json& j, const std::string& where = "marginal") {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ProblemFormatError(where + ": expected an object with a \"type\" field");
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "pareto") {
      if (!j.contains("alpha")) throw ProblemFormatError(where + ": pareto model needs \"alpha\"");
      return MarginalModel::pareto(detail::rational_field(j["alpha"], where + ".alpha"));
    }
    if (type == "constant") {
      if (!j.contains("value")) throw ProblemFormatError(where + ": constant model needs \"value\"");
      return MarginalModel::constant(detail::rational_field(j["value"], where + ".value"));
    }
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(where + ": " + e.what());
  }
  throw ProblemFormatError(where + ": unknown model type \"" + type + "\"");
}

inline json marginal_to_json(const MarginalModel& model) {
  if (model.is_pareto()) return {{"type", "pareto"}, {"alpha", to_string(model.alpha())}};
  return {{"type", "constant"}, {"value", to_string(model.value())}};
}

inline ProblemSpec problem_from_json(const json& doc) {
  if (!doc.is_object()) throw ProblemFormatError("problem: expected a JSON object");
  for (const char* key : {"A", "c", "marginals"})
    if (!doc.contains(key)) throw ProblemFormatError(std::string("problem: missing field \"") + key + "\"");
  const json& a = doc["A"];
  if (!a.is_array() || a.empty()) throw ProblemFormatError("A: expected a non-empty array of rows");
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string where = "A[" + std::to_string(i) + "]";
    if (!a[i].is_array() || a[i].empty()) throw ProblemFormatError(where + ": expected a non-empty array");
    if (i > 0 && a[i].size() != a[0].size())
      throw ProblemFormatError(where + ": has " + std::to_string(a[i].size()) + " entries, row 0 has " +
                               std::to_string(a[0].size()) + " (A must be rectangular)");
    RationalVector row;
    for (std::size_t j = 0; j < a[i].size(); ++j)
      row.push_back(detail::rational_field(a[i][j], where + "[" + std::to_string(j) + "]"));
    rows.push_back(std::move(row));
  }
  const json& c = doc["c"];
  if (!c.is_array()) throw ProblemFormatError("c: expected an array");
  RationalVector thresholds;
  for (std::size_t i = 0; i < c.size(); ++i) thresholds.push_back(detail::rational_field(c[i], "c[" + std::to_string(i) + "]"));
  const json& ms = doc["marginals"];
  if (!ms.is_array()) throw ProblemFormatError("marginals: expected an array");
  std::vector<MarginalModel> models;
  for (std::size_t j = 0; j < ms.size(); ++j) models.push_back(marginal_from_json(ms[j], "marginals[" + std::to_string(j) + "]"));
  try {
    return ProblemSpec(RationalMatrix(rows), std::move(thresholds), std::move(models));
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(e.what());
  }
}

inline json problem_to_json(const ProblemSpec& spec) {
  json a = json::array();
  for (std::size_t i = 0; i < spec.rows(); ++i) a.push_back(detail::rational_list(spec.A.row(i)));
  json ms = json::array();
  for (const auto& m : spec.marginals) ms.push_back(marginal_to_json(m));
  return {{"A", a}, {"c", detail::rational_list(spec.c)}, {"marginals", ms}};
}

/// Reads and validates a problem file. Syntax errors carry line and column.
inline ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFormatError(path + ": cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ProblemFormatError(path + ": " + e.what());
  }
  try {
    return problem_from_json(doc);
  } catch (const ProblemFormatError& e) {
    throw ProblemFormatError(path + ": " + e.what());
  }
}

inline json report_to_json(const TailReport& report) {
  json out;
  out["status"] = to_string(report.status);
  const auto& p = report.primal;
  out["lp_status"] = to_string(p.status);
  if (p.optimal()) {
    out["kappa"] = detail::rational_list(p.kappa);
    out["kappa_decimal"] = detail::decimal_list(p.kappa);
    out["objective"] = to_string(p.objective);
    json basis = json::array();
    for (auto b : p.basis) basis.push_back(b + 1);
    out["basis"] = basis;
    json tight = json::array();
    for (auto r : p.tight_rows) tight.push_back(r + 1);
    out["tight_rows"] = tight;
    out["unique"] = report.uniqueness.unique();
    out["uniqueness"] = to_string(report.uniqueness.verdict);
    out["nondegenerate"] = p.is_nondegenerate;
    json witnesses = json::array();
    for (const auto& w : report.uniqueness.optimal_points) witnesses.push_back(detail::rational_list(w));
    out["optimal_points"] = witnesses;
  }
  if (report.rv_index) {
    out["rv_index"] = to_string(*report.rv_index);
    out["rv_index_decimal"] = to_double(*report.rv_index);
  }
  if (report.dual) {
    out["kappa_hat"] = detail::rational_list(report.dual->kappa_hat);
    out["kappa_hat_decimal"] = detail::decimal_list(report.dual->kappa_hat);
    out["reduced_costs"] = detail::rational_list(report.dual->reduced_costs);
    out["det_A_kappa"] = to_string(report.dual->det_A_kappa);
    out["det_A_kappa_decimal"] = to_double(report.dual->det_A_kappa);
  }
  if (report.coefficient) {
    out["coefficient"] = to_string(*report.coefficient);
    out["coefficient_decimal"] = to_double(*report.coefficient);
  }
  json moments = json::array();
  for (const auto& t : report.moments) {
    moments.push_back({{"column", t.column + 1},
                       {"beta", to_string(t.beta)},
                       {"beta_decimal", to_double(t.beta)},
                       {"moment", detail::extended_json(t.value)},
                       {"eps_max", detail::extended_json(t.margin)}});
  }
  out["moments"] = moments;
  out["c"] = detail::rational_list(report.c);
  if (report.constant_at_c) out["constant_at_c"] = detail::extended_json(*report.constant_at_c);
  json log = json::array();
  for (const auto& h : report.hypothesis_log)
    log.push_back({{"condition", h.condition}, {"status", h.passed ? "pass" : "fail"}, {"detail", h.detail}});
  out["hypothesis_log"] = log;
  return out;
}

namespace detail {
inline std::string vector_text(const RationalVector& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + to_string(v[k]);
  return s + ")";
}
}  // namespace detail

/// Human-readable report; rationals as "p/q (≈ d)".
inline std::string report_to_text(const TailReport& report) {
  std::ostringstream os;
  os << "status: " << to_string(report.status) << "\n";
  const auto& p = report.primal;
  if (!p.optimal()) {
    if (const auto* f = report.first_failure()) os << "diagnostic: " << f->detail << "\n";
    return os.str();
  }
  os << "kappa: " << detail::vector_text(p.kappa) << "\n";
  os << "index: " << pretty(*report.rv_index) << "\n";
  os << "optimum: " << to_string(report.uniqueness.verdict) << ", "
     << (p.is_nondegenerate ? "non-degenerate" : "degenerate") << "\n";
  if (report.dual) {
    os << "kappa_hat: " << detail::vector_text(report.dual->kappa_hat) << "\n";
    os << "det A_kappa: " << pretty(report.dual->det_A_kappa) << "\n";
    os << "reduced costs: " << detail::vector_text(report.dual->reduced_costs) << "\n";
  }
  for (const auto& t : report.moments)
    os << "beta_" << t.column + 1 << ": " << pretty(t.beta) << "  E(X_" << t.column + 1 << "^beta) = " << t.value.pretty()
       << "  eps_max = " << t.margin.pretty() << "\n";
  if (report.coefficient) os << "coefficient: " << pretty(*report.coefficient) << "\n";
  if (report.constant_at_c) os << "constant: " << report.constant_at_c->pretty() << "  at c = " << detail::vector_text(report.c) << "\n";
  os << "hypotheses:\n";
  for (const auto& h : report.hypothesis_log)
    os << "  [" << (h.passed ? "pass" : "FAIL") << "] " << h.condition << ": " << h.detail << "\n";
  if (report.status == ReportStatus::hypothesis_violation && !report.uniqueness.unique() &&
      report.uniqueness.optimal_points.size() > 1) {
    os << "optimal solution not unique; witnesses:\n";
    for (const auto& w : report.uniqueness.optimal_points) os << "  " << detail::vector_text(w) << "\n";
  }
  return os.str();
}

inline std::string vertices_to_text(const std::vector<Vertex>& vertices) {
  std::ostringstream os;
  const auto best = optimal_points(vertices);
  std::optional<Rational> best_obj;
  for (const auto& v : vertices)
    if (!best_obj || v.objective < *best_obj) best_obj = v.objective;
  os << vertices.size() << " feasible bases, " << best.size() << " distinct optimal point(s)\n";
  for (const auto& v : vertices) {
    os << "basis {";
    for (std::size_t k = 0; k < v.basis.size(); ++k) os << (k ? "," : "") << v.basis[k] + 1;
    os << "}  kappa = " << detail::vector_text(v.kappa) << "  objective = " << pretty(v.objective);
    if (best_obj && v.objective == *best_obj) os << "  *optimal";
    os << "\n";
  }
  return os.str();
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV columns: x,hits,N,p_hat,normalizer,ratio,stderr (17 significant digits).
inline std::string simulation_to_csv(const SimulationResult& result) {
  std::string out = "x,hits,N,p_hat,normalizer,ratio,stderr\n";
  for (const auto& r : result.rows) {
    out += format_g17(r.x) + "," + std::to_string(r.hits) + "," + std::to_string(r.samples) + "," + format_g17(r.p_hat) +
           "," + format_g17(r.normalizer) + "," + format_g17(r.ratio) + "," + format_g17(r.stderr_ratio) + "\n";
  }
  return out;
}

inline json simulation_to_json(const SimulationResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"x", r.x},
                    {"hits", r.hits},
                    {"N", r.samples},
                    {"p_hat", r.p_hat},
                    {"normalizer", r.normalizer},
                    {"ratio", r.ratio},
                    {"stderr", r.stderr_ratio}});
  return {{"metadata", {{"prng", result.prng}, {"seed", result.seed}, {"chunks", result.chunks}}}, {"rows", rows}};
}

}  // namespace tailprod
