#pragma once

// Tail models for the independent factors X_j. Both families live on [1, inf):
//   Pareto(alpha):  P(X > x) = x^{-alpha} for x >= 1
//   Constant(v):    X = v almost surely, v >= 1

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "tailprod/extended.hpp"
#include "tailprod/rational.hpp"

namespace tailprod {

class MarginalModel {
 public:
  enum class Kind { pareto, constant };

  static MarginalModel pareto(Rational alpha) {
    if (alpha <= 0) throw std::invalid_argument("Pareto tail index must be positive, got " + tailprod::to_string(alpha));
    return MarginalModel(Kind::pareto, std::move(alpha));
  }

  static MarginalModel constant(Rational value) {
    if (value < 1) throw std::invalid_argument("constant factor must be >= 1, got " + tailprod::to_string(value));
    return MarginalModel(Kind::constant, std::move(value));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_pareto() const noexcept { return kind_ == Kind::pareto; }

  /// Tail index of a Pareto model.
  const Rational& alpha() const {
    if (kind_ != Kind::pareto) throw std::logic_error("alpha() on a constant model");
    return param_;
  }

  /// Location of a constant model.
  const Rational& value() const {
    if (kind_ != Kind::constant) throw std::logic_error("value() on a Pareto model");
    return param_;
  }

  std::string describe() const {
    return (kind_ == Kind::pareto ? "Pareto(" : "Constant(") + tailprod::to_string(param_) + ")";
  }

  friend bool operator==(const MarginalModel&, const MarginalModel&) = default;

 private:
  MarginalModel(Kind kind, Rational param) : kind_(kind), param_(std::move(param)) {}

  Kind kind_;
  Rational param_;
};

/// E(X^beta) in [0, inf].
inline ExtendedReal moment(const MarginalModel& model, const Rational& beta) {
  if (model.is_pareto()) {
    const Rational& alpha = model.alpha();
    if (beta >= alpha) return ExtendedReal::infinity();
    return Rational(alpha / (alpha - beta));
  }
  if (auto exact = exact_pow(model.value(), beta)) return *exact;
  return ExtendedReal::approx(std::pow(to_double(model.value()), to_double(beta)));
}

/// sup{eps >= 0 : E(X^{beta+eps}) < inf and E(X^{beta-eps}) < inf}.
/// Lower moments are always finite on [1, inf).
inline ExtendedReal moment_margin(const MarginalModel& model, const Rational& beta) {
  if (!model.is_pareto()) return ExtendedReal::infinity();
  if (beta >= model.alpha()) return Rational(0);
  return Rational(model.alpha() - beta);
}

/// P(X > x).
inline double survival(const MarginalModel& model, double x) {
  if (model.is_pareto()) {
    if (x <= 1) return 1.0;
    return std::pow(x, -to_double(model.alpha()));
  }
  return x < to_double(model.value()) ? 1.0 : 0.0;
}

/// ln P(X > x); -inf when the probability is zero.
inline double log_survival(const MarginalModel& model, double x) {
  if (model.is_pareto()) return x <= 1 ? 0.0 : -to_double(model.alpha()) * std::log(x);
  return x < to_double(model.value()) ? 0.0 : -INFINITY;
}

/// Inverse-transform sample from u in (0, 1).
inline double sample(const MarginalModel& model, double u) {
  if (model.is_pareto()) return std::pow(u, -1.0 / to_double(model.alpha()));
  return to_double(model.value());
}

/// ln of the inverse-transform sample; avoids overflow for small alpha.
inline double log_sample(const MarginalModel& model, double u) {
  if (model.is_pareto()) return -std::log(u) / to_double(model.alpha());
  return std::log(to_double(model.value()));
}

/// Law of X^s when it is again one of the supported families.
/// Pareto(alpha)^s = Pareto(alpha/s) for s > 0; Constant(v)^s when v^s is rational and >= 1.
inline std::optional<MarginalModel> power_law(const MarginalModel& model, const Rational& s) {
  if (s == 0) throw std::invalid_argument("power_law: exponent must be nonzero");
  if (model.is_pareto()) {
    if (s < 0) return std::nullopt;
    return MarginalModel::pareto(model.alpha() / s);
  }
  auto v = exact_pow(model.value(), s);
  if (!v || *v < 1) return std::nullopt;
  return MarginalModel::constant(*v);
}

}  // namespace tailprod
