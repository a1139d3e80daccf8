#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailprod/rational.hpp"

namespace tailprod {

/// Dense row-major matrix of exact rationals, at least 1x1.
class RationalMatrix {
 public:
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("RationalMatrix: need at least one row and one column");
  }

  /// Throws std::invalid_argument when the rows are ragged or empty.
  explicit RationalMatrix(const std::vector<RationalVector>& rows) : RationalMatrix(checked_rows(rows), checked_cols(rows)) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (rows[i].size() != cols_)
        throw std::invalid_argument("RationalMatrix: row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                    " entries, expected " + std::to_string(cols_));
      for (std::size_t j = 0; j < cols_; ++j) {
        (*this)(i, j) = rows[i][j];
        (*this)(i, j).canonicalize();
      }
    }
  }

  RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows)
      : RationalMatrix(std::vector<RationalVector>(rows.begin(), rows.end())) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalVector row(std::size_t i) const { return {data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_}; }

  RationalVector column(std::size_t j) const {
    RationalVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  /// Submatrix keeping the listed columns in order.
  RationalMatrix select_columns(std::span<const std::size_t> columns) const {
    RationalMatrix out(rows_, columns.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < columns.size(); ++k) out(i, k) = (*this)(i, columns[k]);
    return out;
  }

  RationalMatrix transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// A x
  RationalVector apply(std::span<const Rational> x) const {
    if (x.size() != cols_) throw std::invalid_argument("RationalMatrix::apply: size mismatch");
    RationalVector y(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  /// y^T A, returned as a column vector.
  RationalVector apply_transpose(std::span<const Rational> y) const {
    if (y.size() != rows_) throw std::invalid_argument("RationalMatrix::apply_transpose: size mismatch");
    RationalVector x(cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) x[j] += y[i] * (*this)(i, j);
    return x;
  }

  std::vector<RationalVector> to_rows() const {
    std::vector<RationalVector> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
    return out;
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  static std::size_t checked_rows(const std::vector<RationalVector>& rows) {
    if (rows.empty() || rows.front().empty())
      throw std::invalid_argument("RationalMatrix: need at least one row and one column");
    return rows.size();
  }
  static std::size_t checked_cols(const std::vector<RationalVector>& rows) { return checked_rows(rows) ? rows.front().size() : 0; }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Rational> data_;
};

/// Exact determinant of a square matrix (Gaussian elimination over Q).
inline Rational determinant(RationalMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix is not square");
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m(pivot, k) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pivot, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      const Rational f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Solves M x = b exactly; std::nullopt when M is singular.
inline std::optional<RationalVector> solve(RationalMatrix m, RationalVector b) {
  if (m.rows() != m.cols() || b.size() != m.rows()) throw std::invalid_argument("solve: dimension mismatch");
  const std::size_t n = m.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m(pivot, k) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pivot, j));
      std::swap(b[k], b[pivot]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      const Rational f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= m(i, i);
  return b;
}

}  // namespace tailprod
