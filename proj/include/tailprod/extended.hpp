#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "tailprod/rational.hpp"

namespace tailprod {

/// A nonnegative extended real: exact rational, floating-point approximation
/// (when the value is not known to be rational) or +infinity.
class ExtendedReal {
 public:
  struct Infinity {
    friend bool operator==(Infinity, Infinity) { return true; }
  };

  ExtendedReal() : value_(Rational(0)) {}
  ExtendedReal(Rational r) : value_(std::move(r)) {}
  static ExtendedReal approx(double v) {
    ExtendedReal e;
    if (std::isinf(v))
      e.value_ = Infinity{};
    else
      e.value_ = v;
    return e;
  }
  static ExtendedReal infinity() {
    ExtendedReal e;
    e.value_ = Infinity{};
    return e;
  }

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  bool is_infinite() const { return std::holds_alternative<Infinity>(value_); }
  bool is_finite() const { return !is_infinite(); }

  /// Throws std::bad_variant_access unless is_exact().
  const Rational& exact() const { return std::get<Rational>(value_); }

  double to_double() const {
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    if (is_exact()) return tailprod::to_double(exact());
    return std::get<double>(value_);
  }

  /// "p/q", a decimal with 17 significant digits, or "inf".
  std::string to_string() const {
    if (is_infinite()) return "inf";
    if (is_exact()) return tailprod::to_string(exact());
    return to_decimal(std::get<double>(value_), 17);
  }

  std::string pretty() const {
    if (is_infinite()) return "+inf";
    if (is_exact()) return tailprod::pretty(exact());
    return "≈ " + to_decimal(std::get<double>(value_), 12);
  }

  /// 0 * inf is taken as 0 (measure-theoretic convention).
  friend ExtendedReal operator*(const ExtendedReal& a, const ExtendedReal& b) {
    const bool a_zero = a.is_exact() && a.exact() == 0;
    const bool b_zero = b.is_exact() && b.exact() == 0;
    if (a_zero || b_zero) return Rational(0);
    if (a.is_infinite() || b.is_infinite()) return infinity();
    if (a.is_exact() && b.is_exact()) return Rational(a.exact() * b.exact());
    return approx(a.to_double() * b.to_double());
  }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) { return a.value_ == b.value_; }

 private:
  std::variant<Rational, double, Infinity> value_;
};

}  // namespace tailprod
