#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tailprod/matrix.hpp"
#include "tailprod/rational.hpp"

namespace tailprod {

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
  }
  return "?";
}

/// min cost^T x  s.t.  A x = b, x >= 0.
struct StandardFormLp {
  RationalMatrix A;
  RationalVector b;
  RationalVector cost;
};

struct SimplexResult {
  LpStatus status = LpStatus::infeasible;
  RationalVector x;                 // primal solution, size = A.cols()
  std::vector<std::size_t> basis;   // basis[i] = column basic in row i
  Rational objective = 0;
  std::size_t pivots = 0;
};

namespace detail {

/// Dense tableau for the two-phase method. Columns: structural, artificial, rhs.
class Tableau {
 public:
  Tableau(const StandardFormLp& lp)
      : rows_(lp.A.rows()), structural_(lp.A.cols()), width_(structural_ + rows_ + 1), cells_(rows_ * width_), cost_(width_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      const bool flip = lp.b[i] < 0;
      for (std::size_t j = 0; j < structural_; ++j) at(i, j) = flip ? Rational(-lp.A(i, j)) : lp.A(i, j);
      at(i, structural_ + i) = 1;
      rhs(i) = flip ? Rational(-lp.b[i]) : lp.b[i];
      basis_.push_back(structural_ + i);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t structural() const { return structural_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  Rational& at(std::size_t i, std::size_t j) { return cells_[i * width_ + j]; }
  const Rational& at(std::size_t i, std::size_t j) const { return cells_[i * width_ + j]; }
  Rational& rhs(std::size_t i) { return at(i, width_ - 1); }
  const Rational& rhs(std::size_t i) const { return at(i, width_ - 1); }
  bool is_artificial(std::size_t j) const { return j >= structural_ && j < structural_ + rows_; }

  /// Installs a cost vector over all non-rhs columns and prices out the basis.
  void set_cost(const RationalVector& full_cost) {
    for (std::size_t j = 0; j + 1 < width_; ++j) cost_[j] = full_cost[j];
    cost_[width_ - 1] = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Rational cb = cost_[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < width_; ++j) cost_[j] -= cb * at(i, j);
    }
  }

  Rational objective() const { return -cost_[width_ - 1]; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = at(r, c);
    for (std::size_t j = 0; j < width_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || at(i, c) == 0) continue;
      const Rational f = at(i, c);
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
    }
    if (cost_[c] != 0) {
      const Rational f = cost_[c];
      for (std::size_t j = 0; j < width_; ++j) cost_[j] -= f * at(r, j);
    }
    basis_[r] = c;
    ++pivots_;
  }

  /// Bland's rule iterations. Returns false when the LP is unbounded.
  bool optimize(bool allow_artificial) {
    for (;;) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j + 1 < width_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (cost_[j] < 0) {
          entering = j;
          break;
        }
      }
      if (!entering) return true;
      std::optional<std::size_t> leaving;
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (at(i, *entering) <= 0) continue;
        Rational ratio = rhs(i) / at(i, *entering);
        if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*leaving])) {
          leaving = i;
          best_ratio = std::move(ratio);
        }
      }
      if (!leaving) return false;
      pivot(*leaving, *entering);
    }
  }

  /// Pivots zero-level artificials out of the basis. Rows with no usable
  /// structural entry are redundant and keep their artificial.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < structural_; ++j) {
        if (at(i, j) != 0) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::size_t pivots() const { return pivots_; }

 private:
  std::size_t rows_;
  std::size_t structural_;
  std::size_t width_;
  std::vector<Rational> cells_;
  std::vector<Rational> cost_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Two-phase primal simplex in exact arithmetic with Bland's rule
/// (lowest-index entering column, lowest-index leaving variable on ties).
inline SimplexResult solve_standard_form(const StandardFormLp& lp) {
  const std::size_t rows = lp.A.rows();
  const std::size_t cols = lp.A.cols();
  if (lp.b.size() != rows || lp.cost.size() != cols) throw std::invalid_argument("solve_standard_form: dimension mismatch");

  detail::Tableau tab(lp);
  RationalVector phase_one(cols + rows);
  for (std::size_t i = 0; i < rows; ++i) phase_one[cols + i] = 1;
  tab.set_cost(phase_one);
  tab.optimize(true);

  SimplexResult result;
  if (tab.objective() != 0) {
    result.status = LpStatus::infeasible;
    result.pivots = tab.pivots();
    return result;
  }
  tab.expel_artificials();

  RationalVector phase_two(cols + rows);
  for (std::size_t j = 0; j < cols; ++j) phase_two[j] = lp.cost[j];
  tab.set_cost(phase_two);
  const bool bounded = tab.optimize(false);

  result.status = bounded ? LpStatus::optimal : LpStatus::unbounded;
  result.basis = tab.basis();
  result.x.assign(cols, Rational(0));
  for (std::size_t i = 0; i < rows; ++i)
    if (!tab.is_artificial(tab.basis()[i])) result.x[tab.basis()[i]] = tab.rhs(i);
  result.objective = tab.objective();
  result.pivots = tab.pivots();
  return result;
}

}  // namespace tailprod
