#pragma once

// Exact solver and certifier for the exponent program
//
//     minimize sum_j x_j   subject to   A x >= 1,  x >= 0,
//
// its dual (maximize sum_i y_i s.t. A^T y <= 1, y >= 0), reduced costs,
// basis enumeration and the minimax margin used by the positivity transform.
//
// Standard form: A x - s = 1 with surplus variables s >= 0. Standard-form
// columns are numbered 0..m-1 for x and m..m+n-1 for s.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailprod/matrix.hpp"
#include "tailprod/rational.hpp"
#include "tailprod/simplex.hpp"

namespace tailprod {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100000;

/// A mathematical precondition of an operation does not hold.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  EnumerationBudgetExceeded(std::uint64_t required, std::uint64_t budget)
      : std::runtime_error("basis enumeration needs " + std::to_string(required) + " bases, budget is " +
                           std::to_string(budget)),
        required_(required),
        budget_(budget) {}
  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

struct PrimalSolution {
  LpStatus status = LpStatus::infeasible;
  RationalVector kappa;             // size m
  std::vector<std::size_t> basis;   // standard-form columns, one per row
  Rational objective = 0;
  bool is_unique = false;           // sound: true only when proven
  bool is_nondegenerate = false;
  std::vector<std::size_t> tight_rows;
  std::optional<std::size_t> infeasible_row;  // a row with all entries <= 0, when present

  bool optimal() const noexcept { return status == LpStatus::optimal; }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> j;
    for (std::size_t k = 0; k < kappa.size(); ++k)
      if (kappa[k] > 0) j.push_back(k);
    return j;
  }
};

struct DualInfo {
  RationalVector kappa_hat;          // size n
  RationalVector reduced_costs;      // size m, 1 - (1^T A_kappa^{-1} A)_j
  RationalVector basis_inverse_row;  // 1^T A_kappa^{-1}
  std::vector<std::size_t> kappa_columns;
  Rational det_A_kappa = 0;
};

enum class UniquenessVerdict { unique, not_unique, inconclusive };

inline const char* to_string(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::unique:
      return "unique";
    case UniquenessVerdict::not_unique:
      return "not unique";
    case UniquenessVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct UniquenessReport {
  UniquenessVerdict verdict = UniquenessVerdict::inconclusive;
  enum class Method { reduced_costs, ratio_step, enumeration, none } method = Method::none;
  /// Distinct optimal points found (the solution itself plus alternatives).
  std::vector<RationalVector> optimal_points;
  std::string reason;

  bool unique() const noexcept { return verdict == UniquenessVerdict::unique; }
};

struct Vertex {
  std::vector<std::size_t> basis;
  RationalVector kappa;
  Rational objective;
};

namespace detail {

inline StandardFormLp exponent_program(const RationalMatrix& A) {
  const std::size_t n = A.rows(), m = A.cols();
  StandardFormLp lp{RationalMatrix(n, m + n), RationalVector(n, Rational(1)), RationalVector(m + n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) lp.A(i, j) = A(i, j);
    lp.A(i, m + i) = -1;
  }
  for (std::size_t j = 0; j < m; ++j) lp.cost[j] = 1;
  return lp;
}

/// Values of all standard-form variables for a primal point x.
inline RationalVector standard_form_point(const RationalMatrix& A, const RationalVector& x) {
  RationalVector full(x);
  for (const auto& v : A.apply(x)) full.push_back(v - 1);
  return full;
}

/// Simplex multipliers y with B^T y = c_B for a standard-form basis.
inline std::optional<RationalVector> multipliers(const StandardFormLp& lp, const std::vector<std::size_t>& basis) {
  const std::size_t n = lp.A.rows();
  RationalMatrix bt(n, n);
  RationalVector cb(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) bt(k, i) = lp.A(i, basis[k]);
    cb[k] = lp.cost[basis[k]];
  }
  return solve(std::move(bt), std::move(cb));
}

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

/// Number of candidate bases C(m+n, n) of the standard form, saturating at
/// std::numeric_limits<uint64_t>::max() - 1.
inline std::uint64_t basis_count(const RationalMatrix& A) {
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max() - 1;
  return detail::binomial_capped(A.rows() + A.cols(), A.rows(), cap);
}

/// Every feasible basis of the standard form with its structural point and objective.
/// Throws EnumerationBudgetExceeded when C(m+n, n) > budget.
inline std::vector<Vertex> enumerate_vertices(const RationalMatrix& A, std::uint64_t budget = kDefaultEnumerationBudget) {
  const std::size_t n = A.rows(), m = A.cols();
  const std::uint64_t required = basis_count(A);
  if (required > budget) throw EnumerationBudgetExceeded(required, budget);

  const StandardFormLp lp = detail::exponent_program(A);
  std::vector<Vertex> out;
  std::vector<std::size_t> basis(n);
  for (std::size_t k = 0; k < n; ++k) basis[k] = k;
  const std::size_t total = m + n;
  for (;;) {
    if (auto values = solve(lp.A.select_columns(basis), lp.b)) {
      if (std::all_of(values->begin(), values->end(), [](const Rational& v) { return v >= 0; })) {
        Vertex v{basis, RationalVector(m), 0};
        for (std::size_t k = 0; k < n; ++k)
          if (basis[k] < m) v.kappa[basis[k]] = (*values)[k];
        v.objective = sum(v.kappa);
        out.push_back(std::move(v));
      }
    }
    // next n-combination of {0..total-1} in lexicographic order
    std::size_t pos = n;
    while (pos > 0 && basis[pos - 1] == total - n + pos - 1) --pos;
    if (pos == 0) break;
    ++basis[pos - 1];
    for (std::size_t k = pos; k < n; ++k) basis[k] = basis[k - 1] + 1;
  }
  return out;
}

/// Distinct structural points attaining the minimum objective among `vertices`.
inline std::vector<RationalVector> optimal_points(const std::vector<Vertex>& vertices) {
  std::vector<RationalVector> best;
  std::optional<Rational> best_obj;
  for (const auto& v : vertices) {
    if (!best_obj || v.objective < *best_obj) {
      best_obj = v.objective;
      best.clear();
    }
    if (v.objective == *best_obj && std::find(best.begin(), best.end(), v.kappa) == best.end()) best.push_back(v.kappa);
  }
  return best;
}

/// Standard-form reduced costs c_j - y^T a_j at a basis (size m+n).
inline RationalVector standard_form_reduced_costs(const RationalMatrix& A, const std::vector<std::size_t>& basis) {
  const StandardFormLp lp = detail::exponent_program(A);
  auto y = detail::multipliers(lp, basis);
  if (!y) throw std::logic_error("standard_form_reduced_costs: singular basis");
  RationalVector rc(lp.cost);
  const RationalVector ya = lp.A.apply_transpose(*y);
  for (std::size_t j = 0; j < rc.size(); ++j) rc[j] -= ya[j];
  return rc;
}

/// Uniqueness of the optimum of the exponent program.
///
/// Strictly positive reduced costs on every non-basic standard-form column
/// prove uniqueness. At a non-degenerate basis a zero reduced cost yields an
/// alternative optimum by one ratio step. Otherwise the distinct optimal
/// vertices are enumerated when C(m+n, n) fits in the budget.
inline UniquenessReport certify_uniqueness(const RationalMatrix& A, const PrimalSolution& sol,
                                           std::uint64_t budget = kDefaultEnumerationBudget) {
  if (!sol.optimal()) throw HypothesisError("certify_uniqueness: solution is not optimal");
  const std::size_t n = A.rows(), m = A.cols();
  UniquenessReport report;
  report.optimal_points.push_back(sol.kappa);

  const RationalVector rc = standard_form_reduced_costs(A, sol.basis);
  std::vector<bool> basic(m + n, false);
  for (auto b : sol.basis) basic[b] = true;
  std::optional<std::size_t> zero_column;
  for (std::size_t j = 0; j < m + n; ++j) {
    if (!basic[j] && rc[j] <= 0) {
      zero_column = j;
      break;
    }
  }
  if (!zero_column) {
    report.verdict = UniquenessVerdict::unique;
    report.method = UniquenessReport::Method::reduced_costs;
    report.reason = "all non-basic reduced costs are strictly positive";
    return report;
  }

  const StandardFormLp lp = detail::exponent_program(A);
  const RationalVector point = detail::standard_form_point(A, sol.kappa);
  const bool basis_positive =
      std::all_of(sol.basis.begin(), sol.basis.end(), [&](std::size_t b) { return point[b] > 0; });
  if (basis_positive) {
    // Move along the edge of the zero-reduced-cost column.
    auto direction = solve(lp.A.select_columns(sol.basis), lp.A.column(*zero_column));
    if (!direction) throw std::logic_error("certify_uniqueness: singular basis");
    std::optional<Rational> step;
    for (std::size_t k = 0; k < n; ++k) {
      if ((*direction)[k] > 0) {
        Rational ratio = point[sol.basis[k]] / (*direction)[k];
        if (!step || ratio < *step) step = ratio;
      }
    }
    const Rational theta = step.value_or(Rational(1));
    RationalVector alt(point);
    alt[*zero_column] += theta;
    for (std::size_t k = 0; k < n; ++k) alt[sol.basis[k]] -= theta * (*direction)[k];
    alt.resize(m);
    report.verdict = UniquenessVerdict::not_unique;
    report.method = UniquenessReport::Method::ratio_step;
    report.optimal_points.push_back(std::move(alt));
    report.reason = "non-basic column " + std::to_string(*zero_column + 1) +
                    " has zero reduced cost at a non-degenerate basis";
    return report;
  }

  try {
    auto points = optimal_points(enumerate_vertices(A, budget));
    report.method = UniquenessReport::Method::enumeration;
    report.optimal_points = std::move(points);
    // keep sol.kappa first for readable witnesses
    auto it = std::find(report.optimal_points.begin(), report.optimal_points.end(), sol.kappa);
    if (it != report.optimal_points.end()) std::iter_swap(report.optimal_points.begin(), it);
    if (report.optimal_points.size() == 1) {
      report.verdict = UniquenessVerdict::unique;
      report.reason = "degenerate basis; enumeration found a single optimal vertex";
    } else {
      report.verdict = UniquenessVerdict::not_unique;
      report.reason = "enumeration found " + std::to_string(report.optimal_points.size()) + " optimal vertices";
    }
  } catch (const EnumerationBudgetExceeded& e) {
    report.verdict = UniquenessVerdict::inconclusive;
    report.reason = std::string("degenerate basis with a non-positive reduced cost; ") + e.what();
  }
  return report;
}

/// Exact optimum of min sum x s.t. A x >= 1, x >= 0.
inline PrimalSolution solve_primal(const RationalMatrix& A, std::uint64_t budget = kDefaultEnumerationBudget) {
  const std::size_t n = A.rows(), m = A.cols();
  PrimalSolution sol;
  for (std::size_t i = 0; i < n && !sol.infeasible_row; ++i) {
    bool all_nonpositive = true;
    for (std::size_t j = 0; j < m; ++j) all_nonpositive = all_nonpositive && A(i, j) <= 0;
    if (all_nonpositive) sol.infeasible_row = i;
  }
  const SimplexResult res = solve_standard_form(detail::exponent_program(A));
  sol.status = res.status;
  if (res.status == LpStatus::unbounded)
    throw std::logic_error("solve_primal: objective unbounded below on x >= 0 (invariant violated)");
  if (res.status != LpStatus::optimal) return sol;

  sol.kappa.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(m));
  sol.basis = res.basis;
  std::sort(sol.basis.begin(), sol.basis.end());
  sol.objective = sum(sol.kappa);
  const RationalVector ax = A.apply(sol.kappa);
  for (std::size_t i = 0; i < n; ++i)
    if (ax[i] == 1) sol.tight_rows.push_back(i);

  const RationalVector point = detail::standard_form_point(A, sol.kappa);
  const bool basis_positive =
      std::all_of(sol.basis.begin(), sol.basis.end(), [&](std::size_t b) { return point[b] > 0; });
  sol.is_nondegenerate = basis_positive && sol.support().size() == n;
  sol.is_unique = certify_uniqueness(A, sol, budget).unique();
  return sol;
}

/// Dual solution 1^T A_kappa^{-1} and reduced costs; needs a non-degenerate optimum.
inline DualInfo dual_info(const RationalMatrix& A, const PrimalSolution& sol) {
  if (!sol.optimal()) throw HypothesisError("dual_info: primal solution is not optimal");
  if (!sol.is_nondegenerate)
    throw HypothesisError("dual_info: optimal solution is degenerate (" + std::to_string(sol.support().size()) +
                          " positive components, need " + std::to_string(A.rows()) + "); A_kappa is not square");
  DualInfo info;
  info.kappa_columns = sol.support();
  const RationalMatrix a_kappa = A.select_columns(info.kappa_columns);
  info.det_A_kappa = determinant(a_kappa);
  auto y = solve(a_kappa.transpose(), RationalVector(A.rows(), Rational(1)));
  if (!y) throw HypothesisError("dual_info: A_kappa is singular");
  info.kappa_hat = *y;
  info.basis_inverse_row = *y;
  info.reduced_costs = A.apply_transpose(info.kappa_hat);
  for (auto& r : info.reduced_costs) r = 1 - r;
  return info;
}

struct MinimaxMargin {
  Rational epsilon;      // 1 - value
  Rational value;        // max over the simplex of min_i sum_k (a_ik / a_ij) x_k
  RationalVector point;  // maximizer, indexed by k != j in increasing order
};

/// Largest epsilon with  min_i sum_{k != j} (a_ik/a_ij) x_k <= (1 - epsilon) sum_{k != j} x_k
/// on the nonnegative orthant, obtained from the exact LP
///   max t  s.t.  t <= sum_k (a_ik/a_ij) x_k  for all i,  sum_k x_k = 1,  x >= 0.
/// The margin is positive when kappa is the unique non-degenerate optimum of a
/// matrix whose kappa-columns are positive; otherwise it may be <= 0.
inline MinimaxMargin lemma42_epsilon(const RationalMatrix& A, const PrimalSolution& sol, std::size_t j) {
  const std::size_t n = A.rows(), m = A.cols();
  if (j >= m) throw std::out_of_range("lemma42_epsilon: column index out of range");
  if (sol.optimal() && (sol.kappa.size() != m || sol.kappa[j] <= 0))
    throw HypothesisError("lemma42_epsilon: kappa_" + std::to_string(j + 1) + " is not positive");
  for (std::size_t i = 0; i < n; ++i)
    if (A(i, j) <= 0)
      throw HypothesisError("lemma42_epsilon: a_" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            " <= 0; positivize the matrix first");
  if (m == 1) return {Rational(1), Rational(0), {}};

  // Variables: x_k (k != j), t+, t-, s_i.  Rows: n minimax rows, one simplex row.
  const std::size_t free_vars = m - 1;
  const std::size_t tp = free_vars, tm = free_vars + 1, slack0 = free_vars + 2;
  StandardFormLp lp{RationalMatrix(n + 1, slack0 + n), RationalVector(n + 1), RationalVector(slack0 + n)};
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t col = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      lp.A(i, col++) = -(A(i, k) / A(i, j));
    }
    lp.A(i, tp) = 1;
    lp.A(i, tm) = -1;
    lp.A(i, slack0 + i) = 1;
  }
  for (std::size_t k = 0; k < free_vars; ++k) lp.A(n, k) = 1;
  lp.b[n] = 1;
  lp.cost[tp] = -1;
  lp.cost[tm] = 1;

  const SimplexResult res = solve_standard_form(lp);
  if (res.status != LpStatus::optimal) throw std::logic_error("lemma42_epsilon: minimax LP not optimal");
  MinimaxMargin out;
  out.value = -res.objective;
  out.epsilon = 1 - out.value;
  out.point.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(free_vars));
  return out;
}

}  // namespace tailprod
