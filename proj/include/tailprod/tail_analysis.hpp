#pragma once

// Joint exceedance asymptotics for power products of independent factors:
//
//   P(prod_j X_j^{a_ij} > c_i x, 1 <= i <= n) / prod_{j: kappa_j > 0} P(X_j > x^{kappa_j})
//     -> |det A_kappa|^{-1} prod_i c_i^{-khat_i} / prod_i khat_i * prod_{j: kappa_j = 0} E(X_j^{beta_j})
//
// where kappa is the unique non-degenerate optimum of the exponent program,
// khat = 1^T A_kappa^{-1} its dual and beta_j = (khat^T A)_j. The index of
// regular variation is -sum_j kappa_j.

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailprod/extended.hpp"
#include "tailprod/lp_core.hpp"
#include "tailprod/marginals.hpp"
#include "tailprod/matrix.hpp"
#include "tailprod/rational.hpp"

namespace tailprod {

struct ProblemSpec {
  RationalMatrix A;
  RationalVector c;
  std::vector<MarginalModel> marginals;

  ProblemSpec(RationalMatrix a, RationalVector thresholds, std::vector<MarginalModel> models)
      : A(std::move(a)), c(std::move(thresholds)), marginals(std::move(models)) {
    if (c.size() != A.rows())
      throw std::invalid_argument("ProblemSpec: " + std::to_string(c.size()) + " thresholds for " +
                                  std::to_string(A.rows()) + " rows");
    if (marginals.size() != A.cols())
      throw std::invalid_argument("ProblemSpec: " + std::to_string(marginals.size()) + " marginals for " +
                                  std::to_string(A.cols()) + " columns");
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] <= 0) throw std::invalid_argument("ProblemSpec: threshold c_" + std::to_string(i + 1) + " must be positive");
  }

  std::size_t rows() const { return A.rows(); }
  std::size_t cols() const { return A.cols(); }
};

enum class ReportStatus { certified, hypothesis_violation, infinite_moment, infeasible };

inline const char* to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::certified:
      return "certified";
    case ReportStatus::hypothesis_violation:
      return "hypothesis_violation";
    case ReportStatus::infinite_moment:
      return "infinite_moment";
    case ReportStatus::infeasible:
      return "infeasible";
  }
  return "?";
}

struct HypothesisCheck {
  std::string condition;
  bool passed;
  std::string detail;
};

struct MomentTerm {
  std::size_t column;
  Rational beta;             // (khat^T A)_j
  ExtendedReal value;        // E(X_j^beta)
  ExtendedReal margin;       // sup eps with both neighbouring moments finite
};

struct TailReport {
  ReportStatus status = ReportStatus::infeasible;
  PrimalSolution primal;
  UniquenessReport uniqueness;
  std::optional<DualInfo> dual;
  std::optional<Rational> rv_index;       // -sum kappa
  std::vector<MomentTerm> moments;        // columns with kappa_j = 0
  std::optional<Rational> coefficient;    // |det A_kappa|^{-1} / prod khat_i
  RationalVector c;
  std::optional<ExtendedReal> constant_at_c;
  std::vector<HypothesisCheck> hypothesis_log;

  bool certified() const noexcept { return status == ReportStatus::certified; }
  const RationalVector& kappa() const { return primal.kappa; }
  const RationalVector& kappa_hat() const {
    if (!dual) throw std::logic_error("TailReport: no dual solution");
    return dual->kappa_hat;
  }
  /// First failed condition, if any.
  const HypothesisCheck* first_failure() const {
    for (const auto& h : hypothesis_log)
      if (!h.passed) return &h;
    return nullptr;
  }
};

/// c^{-khat}, exact when every factor is rational.
inline ExtendedReal threshold_factor(const RationalVector& c, const RationalVector& kappa_hat) {
  if (c.size() != kappa_hat.size()) throw std::invalid_argument("threshold_factor: size mismatch");
  ExtendedReal out = Rational(1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] <= 0) throw std::invalid_argument("threshold_factor: thresholds must be positive");
    if (auto e = exact_pow(c[i], -kappa_hat[i]))
      out = out * ExtendedReal(*e);
    else
      out = out * ExtendedReal::approx(std::pow(to_double(c[i]), -to_double(kappa_hat[i])));
  }
  return out;
}

/// Limit constant mu(x_i (c_i, inf)) for new thresholds without re-solving the LP.
/// Exact when every c_i^{-khat_i} and every moment is rational; otherwise a
/// double-precision value (relative accuracy ~1e-15 per factor).
inline ExtendedReal limit_constant(const TailReport& report, const RationalVector& c) {
  if (!report.dual || !report.coefficient) throw HypothesisError("limit_constant: report has no dual data");
  ExtendedReal out = ExtendedReal(*report.coefficient) * threshold_factor(c, report.dual->kappa_hat);
  for (const auto& term : report.moments) out = out * term.value;
  return out;
}

inline TailReport analyze(const ProblemSpec& spec, std::uint64_t enumeration_budget = kDefaultEnumerationBudget) {
  const std::size_t n = spec.rows(), m = spec.cols();
  TailReport report;
  report.c = spec.c;
  auto log = [&](std::string condition, bool passed, std::string detail) {
    report.hypothesis_log.push_back({std::move(condition), passed, std::move(detail)});
    return passed;
  };

  report.primal = solve_primal(spec.A, enumeration_budget);
  if (!report.primal.optimal()) {
    std::string detail = "no x >= 0 with A x >= 1";
    if (report.primal.infeasible_row)
      detail += "; row " + std::to_string(*report.primal.infeasible_row + 1) + " has no positive entry";
    log("lp_optimal", false, detail);
    report.status = ReportStatus::infeasible;
    return report;
  }
  log("lp_optimal", true, "objective " + to_string(report.primal.objective));
  report.rv_index = -report.primal.objective;

  bool hypotheses_hold = true;
  hypotheses_hold &= log("rows_le_columns", n <= m, std::to_string(n) + " rows, " + std::to_string(m) + " columns");

  report.uniqueness = certify_uniqueness(spec.A, report.primal, enumeration_budget);
  {
    std::string detail = report.uniqueness.reason;
    if (!report.uniqueness.unique() && report.uniqueness.optimal_points.size() > 1) {
      detail += "; optimal points:";
      for (const auto& p : report.uniqueness.optimal_points) {
        detail += " (";
        for (std::size_t j = 0; j < p.size(); ++j) detail += (j ? ", " : "") + to_string(p[j]);
        detail += ")";
      }
      detail += "; see the vertex listing";
    }
    hypotheses_hold &= log("unique_optimum", report.uniqueness.unique(), detail);
  }
  hypotheses_hold &= log("nondegenerate_optimum", report.primal.is_nondegenerate,
                         std::to_string(report.primal.support().size()) + " positive components, " + std::to_string(n) +
                             " required");
  if (!report.primal.is_nondegenerate) {
    report.status = ReportStatus::hypothesis_violation;
    return report;
  }

  report.dual = dual_info(spec.A, report.primal);
  const DualInfo& dual = *report.dual;
  hypotheses_hold &= log("A_kappa_invertible", dual.det_A_kappa != 0, "det A_kappa = " + to_string(dual.det_A_kappa));

  for (std::size_t j : dual.kappa_columns) {
    const MarginalModel& model = spec.marginals[j];
    const bool index_one = model.is_pareto() && model.alpha() == 1;
    std::string detail = "X_" + std::to_string(j + 1) + " ~ " + model.describe();
    if (!index_one && model.is_pareto())
      detail += "; rescale column " + std::to_string(j + 1) + " by s = " + to_string(model.alpha()) +
                " so that X_j^s has index -1";
    hypotheses_hold &= log("regular_variation_index_-1[" + std::to_string(j + 1) + "]", index_one, detail);
  }

  Rational prod_khat = 1;
  for (const auto& k : dual.kappa_hat) prod_khat *= k;
  Rational det_abs = abs(dual.det_A_kappa);
  report.coefficient = Rational(1) / (det_abs * prod_khat);

  bool moments_finite = true;
  for (std::size_t j = 0; j < m; ++j) {
    if (report.primal.kappa[j] > 0) continue;
    MomentTerm term{j, 1 - dual.reduced_costs[j], {}, {}};
    term.value = moment(spec.marginals[j], term.beta);
    term.margin = moment_margin(spec.marginals[j], term.beta);
    const bool ok = !(term.margin.is_exact() && term.margin.exact() == 0);
    moments_finite &= ok;
    log("moment_condition[" + std::to_string(j + 1) + "]", ok,
        "beta = " + to_string(term.beta) + ", eps_max = " + term.margin.to_string() + ", E(X^beta) = " +
            term.value.to_string());
    if (report.uniqueness.unique())
      log("dual_slack[" + std::to_string(j + 1) + "]", term.beta < 1, "beta = " + to_string(term.beta) + " < 1");
    report.moments.push_back(std::move(term));
  }

  if (!hypotheses_hold) {
    report.status = ReportStatus::hypothesis_violation;
    return report;
  }
  report.constant_at_c = limit_constant(report, spec.c);
  report.status = moments_finite ? ReportStatus::certified : ReportStatus::infinite_moment;
  return report;
}

/// Column j divided by s: the substitution X_j -> X_j^s.
inline RationalMatrix rescale_column(const RationalMatrix& A, std::size_t j, const Rational& s) {
  if (s == 0) throw std::invalid_argument("rescale_column: scale must be nonzero");
  if (j >= A.cols()) throw std::out_of_range("rescale_column: column index out of range");
  RationalMatrix out = A;
  for (std::size_t i = 0; i < A.rows(); ++i) out(i, j) = A(i, j) / s;
  return out;
}

/// rescale_column together with the matching marginal substitution.
/// Throws HypothesisError when X_j^s is outside the supported families.
inline ProblemSpec rescale_problem(const ProblemSpec& spec, std::size_t j, const Rational& s) {
  auto law = power_law(spec.marginals.at(j), s);
  if (!law)
    throw HypothesisError("rescale_problem: X_" + std::to_string(j + 1) + "^" + to_string(s) + " of " +
                          spec.marginals[j].describe() + " is not a supported model");
  auto models = spec.marginals;
  models[j] = *law;
  return ProblemSpec(rescale_column(spec.A, j, s), spec.c, std::move(models));
}

/// Default free parameter of the positivity transform: a tenth of
/// |min_{i, j in J} a_ij|, at least 1/100.
inline Rational default_positivize_epsilon(const RationalMatrix& A, const RationalVector& kappa) {
  std::optional<Rational> lowest;
  for (std::size_t j = 0; j < A.cols(); ++j) {
    if (kappa.at(j) <= 0) continue;
    for (std::size_t i = 0; i < A.rows(); ++i)
      if (!lowest || A(i, j) < *lowest) lowest = A(i, j);
  }
  const Rational tenth = lowest ? Rational(abs(*lowest) / 10) : Rational(0);
  const Rational floor(1, 100);
  return tenth < floor ? floor : tenth;
}

/// Transform making every kappa-column strictly positive while keeping kappa
/// optimal:  a~_ij = (a_ij + a_min (A^T khat)_j) / (1 + a_min sum kappa),
/// a_min = -min_{i, j in J} a_ij + epsilon. Returns A unchanged when those
/// columns are already positive.
inline RationalMatrix positivize(const RationalMatrix& A, const RationalVector& kappa, const RationalVector& kappa_hat,
                                 std::optional<Rational> epsilon = std::nullopt) {
  const std::size_t n = A.rows(), m = A.cols();
  if (kappa.size() != m || kappa_hat.size() != n) throw HypothesisError("positivize: kappa/khat sizes do not match A");
  for (std::size_t j = 0; j < m; ++j)
    if (kappa[j] < 0) throw HypothesisError("positivize: kappa has a negative component");
  for (std::size_t i = 0; i < n; ++i)
    if (kappa_hat[i] < 0) throw HypothesisError("positivize: khat has a negative component");
  const RationalVector ax = A.apply(kappa);
  for (std::size_t i = 0; i < n; ++i)
    if (ax[i] < 1) throw HypothesisError("positivize: kappa violates row " + std::to_string(i + 1) + " of A x >= 1");
  const RationalVector aty = A.apply_transpose(kappa_hat);
  for (std::size_t j = 0; j < m; ++j)
    if (aty[j] > 1) throw HypothesisError("positivize: khat violates column " + std::to_string(j + 1) + " of A^T y <= 1");
  if (sum(kappa) != sum(kappa_hat)) throw HypothesisError("positivize: duality gap, kappa and khat are not both optimal");

  std::optional<Rational> lowest;
  for (std::size_t j = 0; j < m; ++j) {
    if (kappa[j] <= 0) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (!lowest || A(i, j) < *lowest) lowest = A(i, j);
  }
  if (!lowest || *lowest > 0) return A;

  const Rational eps = epsilon.value_or(default_positivize_epsilon(A, kappa));
  if (eps <= 0) throw std::invalid_argument("positivize: epsilon must be positive");
  const Rational a_min = -*lowest + eps;
  const Rational denom = 1 + a_min * sum(kappa);
  RationalMatrix out(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = (A(i, j) + a_min * aty[j]) / denom;
  return out;
}

}  // namespace tailprod
