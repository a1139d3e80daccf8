#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tailprod {

/// Exact rational number (GMP, always kept in canonical form).
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "p", "-p" or "p/q". Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
  auto valid_integer = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char ch : s)
      if (ch < '0' || ch > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!valid_integer(num) || !valid_integer(den) || den.front() == '-' || den.front() == '+')
    throw ParseError("not a rational: '" + std::string(text) + "'");
  if (num.front() == '+') num.remove_prefix(1);
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// Decimal rendering with `digits` significant digits.
inline std::string to_decimal(double v, int digits = 6) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string to_decimal(const Rational& r, int digits = 6) { return to_decimal(to_double(r), digits); }

/// Human form "p/q (≈ d)"; integers print without the approximation.
inline std::string pretty(const Rational& r) {
  if (r.get_den() == 1) return to_string(r);
  return to_string(r) + " (≈ " + to_decimal(r) + ")";
}

inline Rational sum(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

/// base^k for integer k, exact. base must be nonzero when k < 0.
inline Rational pow_int(const Rational& base, long k) {
  if (k < 0) {
    if (base == 0) throw std::domain_error("pow_int: zero to a negative power");
    return pow_int(Rational(1) / base, -k);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(k));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(k));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// base^exponent when the result is rational, std::nullopt otherwise.
/// Requires base > 0.
inline std::optional<Rational> exact_pow(const Rational& base, const Rational& exponent) {
  if (base <= 0) throw std::domain_error("exact_pow: base must be positive");
  if (exponent == 0) return Rational(1);
  const mpz_class& p = exponent.get_num();
  const mpz_class& q = exponent.get_den();
  if (!q.fits_ulong_p() || !p.fits_slong_p()) return std::nullopt;
  const unsigned long root = q.get_ui();
  mpz_class num_root, den_root;
  if (mpz_root(num_root.get_mpz_t(), base.get_num_mpz_t(), root) == 0) return std::nullopt;
  if (mpz_root(den_root.get_mpz_t(), base.get_den_mpz_t(), root) == 0) return std::nullopt;
  Rational rooted(num_root, den_root);
  rooted.canonicalize();
  const long k = p.get_si();
  if (std::labs(k) > 4096) return std::nullopt;
  return pow_int(rooted, k);
}

}  // namespace tailprod
