#pragma once

// Finite-x checks of the exceedance asymptotics: seeded Monte Carlo of the
// normalized exceedance ratio, a quadrature oracle for the exceedance
// probability itself, and log-log slope fitting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "tailprod/marginals.hpp"
#include "tailprod/quadrature.hpp"
#include "tailprod/rng.hpp"
#include "tailprod/tail_analysis.hpp"

namespace tailprod {

struct SimulationConfig {
  std::vector<double> x_grid;
  std::uint64_t samples_per_x = 1000000;
  std::uint64_t seed = 0;
  std::uint64_t chunks = 1;
  unsigned threads = 0;  // 0: hardware concurrency; never affects the result

  void validate() const {
    if (x_grid.empty()) throw std::invalid_argument("SimulationConfig: empty x grid");
    for (std::size_t k = 0; k < x_grid.size(); ++k) {
      if (!(x_grid[k] > 1) || !std::isfinite(x_grid[k]))
        throw std::invalid_argument("SimulationConfig: thresholds must be finite and > 1");
      if (k > 0 && !(x_grid[k] > x_grid[k - 1]))
        throw std::invalid_argument("SimulationConfig: x grid must be strictly increasing");
    }
    if (samples_per_x < 1) throw std::invalid_argument("SimulationConfig: samples must be >= 1");
    if (chunks < 1) throw std::invalid_argument("SimulationConfig: chunks must be >= 1");
  }
};

struct SimulationRow {
  double x;
  std::uint64_t hits;
  std::uint64_t samples;
  double p_hat;
  double normalizer;
  double ratio;
  double stderr_ratio;
};

struct SimulationResult {
  std::vector<SimulationRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t chunks = 1;
  std::string prng = Xoshiro256StarStar::name;
};

/// prod_{j: kappa_j > 0} P(X_j > x^{kappa_j}).
inline double normalizer(const ProblemSpec& spec, const RationalVector& kappa, double x) {
  double log_norm = 0;
  for (std::size_t j = 0; j < kappa.size(); ++j)
    if (kappa[j] > 0) log_norm += log_survival(spec.marginals[j], std::pow(x, to_double(kappa[j])));
  return std::exp(log_norm);
}

namespace detail {

struct ChunkCounts {
  std::vector<std::uint64_t> hits;
};

/// Counts, for a block of samples, how many satisfy every row at each grid point.
inline ChunkCounts run_chunk(const ProblemSpec& spec, const std::vector<double>& log_x, std::uint64_t samples,
                             std::uint64_t seed) {
  const std::size_t n = spec.rows(), m = spec.cols();
  std::vector<double> a(n * m), log_c(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_c[i] = std::log(to_double(spec.c[i]));
    for (std::size_t j = 0; j < m; ++j) a[i * m + j] = to_double(spec.A(i, j));
  }
  std::vector<double> inv_alpha(m, 0), log_const(m, 0);
  std::vector<bool> pareto(m);
  for (std::size_t j = 0; j < m; ++j) {
    pareto[j] = spec.marginals[j].is_pareto();
    if (pareto[j])
      inv_alpha[j] = 1.0 / to_double(spec.marginals[j].alpha());
    else
      log_const[j] = std::log(to_double(spec.marginals[j].value()));
  }

  Xoshiro256StarStar rng(seed);
  std::vector<std::uint64_t> exceed(log_x.size() + 1, 0);
  std::vector<double> y(m);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < m; ++j) y[j] = pareto[j] ? -std::log(rng.uniform()) * inv_alpha[j] : log_const[j];
    double margin = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      double row = -log_c[i];
      for (std::size_t j = 0; j < m; ++j) row += a[i * m + j] * y[j];
      margin = std::min(margin, row);
    }
    // the event holds at x iff ln x < margin; grid is increasing
    const auto k = static_cast<std::size_t>(std::lower_bound(log_x.begin(), log_x.end(), margin) - log_x.begin());
    ++exceed[k];
  }
  ChunkCounts out{std::vector<std::uint64_t>(log_x.size(), 0)};
  // hits at grid point g = samples whose margin exceeds log_x[g] = sum of exceed[k] for k > g
  std::uint64_t running = 0;
  for (std::size_t g = log_x.size(); g-- > 0;) {
    running += exceed[g + 1];
    out.hits[g] = running;
  }
  return out;
}

}  // namespace detail

/// Naive Monte Carlo of P(all rows exceed c_i x) / normalizer(x) on a grid.
/// The same N samples are shared by all grid points. Samples are split into
/// cfg.chunks blocks seeded by chunk_seed(seed, k); blocks may run
/// concurrently and their counts are summed, so the output depends only on
/// (spec, grid, N, seed, chunks).
inline SimulationResult estimate_ratio(const ProblemSpec& spec, const TailReport& report, const SimulationConfig& cfg) {
  cfg.validate();
  if (!report.certified())
    throw HypothesisError(std::string("estimate_ratio: analysis is not certified (") + to_string(report.status) + ")");

  std::vector<double> log_x(cfg.x_grid.size());
  std::transform(cfg.x_grid.begin(), cfg.x_grid.end(), log_x.begin(), [](double x) { return std::log(x); });

  std::vector<detail::ChunkCounts> counts(cfg.chunks);
  auto work = [&](std::uint64_t k) {
    const std::uint64_t base = cfg.samples_per_x / cfg.chunks;
    const std::uint64_t samples = base + (k < cfg.samples_per_x % cfg.chunks ? 1 : 0);
    counts[k] = detail::run_chunk(spec, log_x, samples, chunk_seed(cfg.seed, k));
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.chunks));
  if (threads <= 1) {
    for (std::uint64_t k = 0; k < cfg.chunks; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::uint64_t k = t; k < cfg.chunks; k += threads) work(k);
      });
    for (auto& th : pool) th.join();
  }

  SimulationResult result;
  result.seed = cfg.seed;
  result.chunks = cfg.chunks;
  const double n_samples = static_cast<double>(cfg.samples_per_x);
  for (std::size_t g = 0; g < cfg.x_grid.size(); ++g) {
    SimulationRow row{};
    row.x = cfg.x_grid[g];
    row.samples = cfg.samples_per_x;
    for (const auto& c : counts) row.hits += c.hits[g];
    row.p_hat = static_cast<double>(row.hits) / n_samples;
    row.normalizer = normalizer(spec, report.kappa(), row.x);
    row.ratio = row.p_hat / row.normalizer;
    row.stderr_ratio = std::sqrt(row.p_hat * (1 - row.p_hat) / n_samples) / row.normalizer;
    result.rows.push_back(row);
  }
  return result;
}

struct ProbabilityEstimate {
  double value = 0;
  double error = 0;  // quadrature error estimate + truncation bound
  bool converged = false;
};

/// P(prod_j X_j^{a_ij} > c_i x for all i) by quadrature in log coordinates.
///
/// With Y_j = ln X_j ~ Exp(alpha_j) (a point mass at ln v for Constant(v)),
/// the event is the polyhedron {sum_j a_ij y_j > ln(c_i x)}. The innermost
/// variable (largest coefficient spread across rows) is integrated in closed
/// form; the remaining ones by nested adaptive Gauss-Kronrod on
/// [0, y_max], y_max = (ln(max_i c_i x) + 40) / min_j alpha_j, whose
/// truncated tail mass sum_k exp(-alpha_k y_max) is added to the error.
inline ProbabilityEstimate exact_prob(const ProblemSpec& spec, double x, double tol = 1e-9) {
  const std::size_t n = spec.rows(), m = spec.cols();
  if (m > 4) throw std::invalid_argument("exact_prob: at most 4 factors supported, got " + std::to_string(m));
  if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument("exact_prob: x must be positive and finite");

  std::vector<double> t(n);
  double max_log_cx = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = std::log(to_double(spec.c[i]) * x);
    max_log_cx = std::max(max_log_cx, t[i]);
  }
  std::vector<std::size_t> continuous;
  std::vector<double> alpha(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (spec.marginals[j].is_pareto()) {
      continuous.push_back(j);
      alpha[j] = to_double(spec.marginals[j].alpha());
    } else {
      const double lv = std::log(to_double(spec.marginals[j].value()));
      for (std::size_t i = 0; i < n; ++i) t[i] -= to_double(spec.A(i, j)) * lv;
    }
  }
  auto coef = [&](std::size_t i, std::size_t j) { return to_double(spec.A(i, j)); };

  if (continuous.empty()) {
    const bool hit = std::all_of(t.begin(), t.end(), [](double ti) { return 0 > ti; });
    return {hit ? 1.0 : 0.0, 0.0, true};
  }

  // innermost: largest spread max_i a_ij - min_i a_ij, then largest |a_ij|, then lowest index
  auto spread = [&](std::size_t j) {
    double lo = INFINITY, hi = -INFINITY, mag = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, coef(i, j));
      hi = std::max(hi, coef(i, j));
      mag = std::max(mag, std::abs(coef(i, j)));
    }
    return std::pair{hi - lo, mag};
  };
  std::size_t inner = continuous.front();
  for (std::size_t j : continuous)
    if (spread(j) > spread(inner)) inner = j;
  std::vector<std::size_t> outer;
  for (std::size_t j : continuous)
    if (j != inner) outer.push_back(j);

  const double min_alpha = *std::min_element(alpha.begin(), alpha.end(), [&](double a, double b) {
    return (a > 0 ? a : INFINITY) < (b > 0 ? b : INFINITY);
  });
  const double y_max = (std::max(max_log_cx, 0.0) + 40.0) / min_alpha;
  double truncation = 0;
  for (std::size_t j : outer) truncation += std::exp(-alpha[j] * y_max);

  // P(Y_inner in the interval cut out by all rows), given outer contributions r
  auto innermost = [&](const std::vector<double>& r) {
    double lo = 0, hi = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const double need = t[i] - r[i];
      const double a = coef(i, inner);
      if (a > 0)
        lo = std::max(lo, need / a);
      else if (a < 0)
        hi = std::min(hi, need / a);
      else if (!(0 > need))
        return 0.0;
    }
    if (!(hi > lo)) return 0.0;
    const double al = alpha[inner];
    return std::exp(-al * lo) - (std::isinf(hi) ? 0.0 : std::exp(-al * hi));
  };

  bool converged = true;
  std::function<double(std::size_t, std::vector<double>&)> level = [&](std::size_t d, std::vector<double>& r) -> double {
    if (d == outer.size()) return innermost(r);
    const std::size_t j = outer[d];
    const double al = alpha[j];
    const std::size_t count = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(y_max * al / 4.0)), 8, 64);
    std::vector<double> breaks(count + 1);
    for (std::size_t k = 0; k <= count; ++k) breaks[k] = y_max * static_cast<double>(k) / static_cast<double>(count);
    auto integrand = [&](double y) {
      std::vector<double> rr(r);
      for (std::size_t i = 0; i < n; ++i) rr[i] += coef(i, j) * y;
      return al * std::exp(-al * y) * level(d + 1, rr);
    };
    QuadratureOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = 1e-300;
    const QuadratureResult q = integrate_adaptive(integrand, breaks, opt);
    converged = converged && q.converged;
    return q.value;
  };

  std::vector<double> r(n, 0.0);
  if (outer.empty()) return {innermost(r), 0.0, true};

  // Top level separately so its error estimate is reported.
  const std::size_t j0 = outer.front();
  const double al0 = alpha[j0];
  const std::size_t count = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(y_max * al0 / 4.0)), 8, 64);
  std::vector<double> breaks(count + 1);
  for (std::size_t k = 0; k <= count; ++k) breaks[k] = y_max * static_cast<double>(k) / static_cast<double>(count);
  auto top = [&](double y) {
    std::vector<double> rr(n);
    for (std::size_t i = 0; i < n; ++i) rr[i] = coef(i, j0) * y;
    return al0 * std::exp(-al0 * y) * level(1, rr);
  };
  QuadratureOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = 1e-300;
  const QuadratureResult q = integrate_adaptive(top, breaks, opt);
  ProbabilityEstimate out;
  out.value = q.value;
  out.error = q.error + static_cast<double>(outer.size() - 1) * tol * std::abs(q.value) + truncation;
  out.converged = converged && q.converged;
  return out;
}

/// Points (x, p(x)) with a standard error for each p.
struct TailCurve {
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> se;
};

inline TailCurve curve_from(const SimulationResult& result) {
  TailCurve c;
  for (const auto& row : result.rows) {
    c.x.push_back(row.x);
    c.p.push_back(row.p_hat);
    c.se.push_back(std::sqrt(row.p_hat * (1 - row.p_hat) / static_cast<double>(row.samples)));
  }
  return c;
}

inline TailCurve oracle_curve(const ProblemSpec& spec, const std::vector<double>& xs, double tol = 1e-9) {
  TailCurve c;
  for (double x : xs) {
    const ProbabilityEstimate e = exact_prob(spec, x, tol);
    c.x.push_back(x);
    c.p.push_back(e.value);
    c.se.push_back(e.error);
  }
  return c;
}

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

/// Least-squares slope of ln p against ln x with a 95% parametric-bootstrap
/// interval (ln p_k perturbed by N(0, se_k / p_k), 2000 replicates, fixed seed).
/// Points with p <= 0 are dropped with a warning; fewer than 3 usable points throws.
inline SlopeFit slope_fit(const TailCurve& curve, std::uint64_t seed = 20240601) {
  if (curve.x.size() != curve.p.size() || curve.se.size() != curve.p.size())
    throw std::invalid_argument("slope_fit: ragged curve");
  SlopeFit fit;
  std::vector<double> lx, lp, sd;
  for (std::size_t k = 0; k < curve.x.size(); ++k) {
    if (!(curve.p[k] > 0)) {
      fit.warnings.push_back("dropped x = " + to_decimal(curve.x[k]) + ": no exceedances");
      continue;
    }
    lx.push_back(std::log(curve.x[k]));
    lp.push_back(std::log(curve.p[k]));
    sd.push_back(curve.se[k] / curve.p[k]);
  }
  fit.points_used = lx.size();
  if (lx.size() < 3) throw std::invalid_argument("slope_fit: fewer than 3 usable points");

  auto ols = [&](const std::vector<double>& ys) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxy += (lx[k] - mx) * (ys[k] - my);
      sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    const double b = sxy / sxx;
    return std::pair{b, my - b * mx};
  };
  std::tie(fit.slope, fit.intercept) = ols(lp);

  constexpr int replicates = 2000;
  std::vector<double> slopes;
  slopes.reserve(replicates);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> ys(lp.size());
  for (int b = 0; b < replicates; ++b) {
    for (std::size_t k = 0; k < lp.size(); ++k) ys[k] = lp[k] + sd[k] * z(gen);
    slopes.push_back(ols(ys).first);
  }
  std::sort(slopes.begin(), slopes.end());
  fit.ci_low = slopes[static_cast<std::size_t>(0.025 * (replicates - 1))];
  fit.ci_high = slopes[static_cast<std::size_t>(0.975 * (replicates - 1))];
  return fit;
}

}  // namespace tailprod
