#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace tailprod {

struct QuadratureResult {
  double value = 0;
  double error = 0;
  std::size_t panels = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0;
  std::size_t max_panels = 2000;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) integration over the partition
/// given by `breakpoints` (sorted, at least two). The panel with the largest
/// error estimate is bisected until the total error meets the tolerance or
/// the panel budget runs out.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, const QuadratureOptions& opt = {}) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least two breakpoints");

  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto evaluate = [&](double a, double b) {
    double err = 0;
    const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
    return Panel{a, b, v, err};
  };

  std::priority_queue<Panel> panels;
  double total = 0, total_err = 0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1])) continue;
    Panel p = evaluate(breakpoints[k], breakpoints[k + 1]);
    total += p.value;
    total_err += p.error;
    panels.push(p);
  }

  QuadratureResult out;
  auto satisfied = [&] { return total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!panels.empty() && !satisfied() && panels.size() < opt.max_panels) {
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) break;  // interval exhausted at double resolution
    panels.pop();
    Panel left = evaluate(worst.a, mid);
    Panel right = evaluate(mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0;
  total_err = 0;
  out.panels = panels.size();
  while (!panels.empty()) {
    total += panels.top().value;
    total_err += panels.top().error;
    panels.pop();
  }
  out.value = total;
  out.error = total_err;
  out.converged = total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return out;
}

}  // namespace tailprod
