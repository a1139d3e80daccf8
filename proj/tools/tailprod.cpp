// tailprod: exact tail asymptotics of joint exceedances of random power products.
//
//   tailprod analyze  problem.json [--json]
//   tailprod verify   problem.json --x-grid 10,100,1000 --samples 1000000 --seed 42 [--oracle] [--out r.csv]
//   tailprod vertices problem.json
//
// Exit codes: 0 success, 1 usage/parse/IO error, 2 mathematical failure
// (hypothesis violation, infinite constant, enumeration budget exceeded).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tailprod/tailprod.hpp"

namespace {

using namespace tailprod;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kMathFailure = 2;

std::uint64_t enumeration_budget() {
  if (const char* env = std::getenv("TAILPROD_ENUM_BUDGET")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring malformed TAILPROD_ENUM_BUDGET='" << env << "'\n";
  }
  return kDefaultEnumerationBudget;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

int cmd_analyze(const std::string& path, bool as_json) {
  const ProblemSpec spec = load_problem(path);
  const TailReport report = analyze(spec, enumeration_budget());
  if (as_json)
    std::cout << report_to_json(report).dump(2) << "\n";
  else
    std::cout << report_to_text(report);
  if (report.certified()) return kOk;
  if (const auto* f = report.first_failure()) std::cerr << "error: " << f->condition << ": " << f->detail << "\n";
  if (!report.uniqueness.unique() && report.primal.optimal()) std::cerr << "error: optimal solution not unique\n";
  return kMathFailure;
}

struct VerifyOptions {
  std::string path;
  std::vector<double> x_grid;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  std::uint64_t chunks = 1;
  unsigned threads = 0;
  bool oracle = false;
  double tol = 1e-9;
  std::string out_csv;
  std::string out_json;
};

int cmd_verify(const VerifyOptions& opt) {
  SimulationConfig cfg;
  cfg.x_grid = opt.x_grid;
  cfg.samples_per_x = opt.samples;
  cfg.seed = opt.seed;
  cfg.chunks = opt.chunks;
  cfg.threads = opt.threads;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  const ProblemSpec spec = load_problem(opt.path);
  const TailReport report = analyze(spec, enumeration_budget());
  if (!report.certified()) {
    std::cerr << "error: verification needs a certified finite constant; analysis status is "
              << to_string(report.status) << "\n";
    if (const auto* f = report.first_failure()) std::cerr << "  " << f->condition << ": " << f->detail << "\n";
    return kMathFailure;
  }

  const SimulationResult sim = estimate_ratio(spec, report, cfg);
  const std::string csv = simulation_to_csv(sim);
  if (!opt.out_csv.empty()) {
    if (!write_file(opt.out_csv, csv)) {
      std::cerr << "error: cannot write " << opt.out_csv << "\n";
      return kInputError;
    }
  } else {
    std::cout << csv;
  }

  const bool use_oracle = opt.oracle && spec.cols() <= 4;
  if (opt.oracle && !use_oracle) std::cerr << "warning: quadrature oracle supports at most 4 factors; skipped\n";
  json doc = simulation_to_json(sim);
  doc["analytic_constant"] = report.constant_at_c->to_string();
  doc["rv_index"] = to_string(*report.rv_index);

  std::cout << "prng: " << sim.prng << "  seed: " << sim.seed << "  chunks: " << sim.chunks << "\n";
  std::cout << "analytic constant: " << report.constant_at_c->pretty() << "  index: " << pretty(*report.rv_index) << "\n";
  std::vector<double> oracle_p, oracle_err;
  for (const auto& row : sim.rows) {
    std::cout << "x = " << to_decimal(row.x) << "  ratio = " << to_decimal(row.ratio) << " ± " << to_decimal(row.stderr_ratio)
              << "  (hits " << row.hits << "/" << row.samples << ")";
    if (use_oracle) {
      const ProbabilityEstimate e = exact_prob(spec, row.x, opt.tol);
      oracle_p.push_back(e.value);
      oracle_err.push_back(e.error);
      std::cout << "  oracle ratio = " << to_decimal(e.value / row.normalizer, 8);
      if (!e.converged) std::cout << " (tolerance not reached, error " << to_decimal(e.error) << ")";
    }
    std::cout << "\n";
  }
  if (use_oracle) {
    json rows = json::array();
    for (std::size_t k = 0; k < oracle_p.size(); ++k)
      rows.push_back({{"x", sim.rows[k].x}, {"p", oracle_p[k]}, {"error", oracle_err[k]}});
    doc["oracle"] = rows;
  }

  auto report_slope = [&](const char* label, const TailCurve& curve) {
    try {
      const SlopeFit fit = slope_fit(curve);
      for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << label << " slope: " << to_decimal(fit.slope) << "  95% CI [" << to_decimal(fit.ci_low) << ", "
                << to_decimal(fit.ci_high) << "]  vs analytic index " << pretty(*report.rv_index) << "\n";
      doc[std::string(label) + "_slope"] = {{"slope", fit.slope}, {"ci_low", fit.ci_low}, {"ci_high", fit.ci_high}};
    } catch (const std::invalid_argument& e) {
      std::cout << label << " slope: not available (" << e.what() << ")\n";
    }
  };
  report_slope("mc", curve_from(sim));
  if (use_oracle) report_slope("oracle", TailCurve{opt.x_grid, oracle_p, oracle_err});

  if (!opt.out_json.empty() && !write_file(opt.out_json, doc.dump(2) + "\n")) {
    std::cerr << "error: cannot write " << opt.out_json << "\n";
    return kInputError;
  }
  return kOk;
}

int cmd_vertices(const std::string& path) {
  const ProblemSpec spec = load_problem(path);
  try {
    std::cout << vertices_to_text(enumerate_vertices(spec.A, enumeration_budget()));
  } catch (const EnumerationBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << " (set TAILPROD_ENUM_BUDGET to raise it)\n";
    return kMathFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tail asymptotics of joint exceedance probabilities of random power products"};
  app.require_subcommand(1);

  std::string analyze_path;
  bool analyze_json = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Solve the exponent LP and evaluate the limit constant");
  analyze_cmd->add_option("problem", analyze_path, "Problem file (JSON)")->required();
  analyze_cmd->add_flag("--json", analyze_json, "Print the report as JSON");

  VerifyOptions vopt;
  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo and quadrature checks of the exceedance ratio");
  verify_cmd->add_option("problem", vopt.path, "Problem file (JSON)")->required();
  verify_cmd->add_option("--x-grid", vopt.x_grid, "Increasing thresholds x > 1, comma separated")->delimiter(',')->required();
  verify_cmd->add_option("--samples", vopt.samples, "Samples N per grid point");
  verify_cmd->add_option("--seed", vopt.seed, "64-bit seed");
  verify_cmd->add_option("--chunks", vopt.chunks, "Independent sample blocks (part of the result)");
  verify_cmd->add_option("--threads", vopt.threads, "Worker threads (0 = hardware; does not change the result)");
  verify_cmd->add_flag("--oracle", vopt.oracle, "Also evaluate the quadrature oracle (m <= 4)");
  verify_cmd->add_option("--tol", vopt.tol, "Relative tolerance of the quadrature oracle");
  verify_cmd->add_option("--out", vopt.out_csv, "Write the CSV here instead of stdout");
  verify_cmd->add_option("--json-out", vopt.out_json, "Write results and metadata as JSON");

  std::string vertices_path;
  auto* vertices_cmd = app.add_subcommand("vertices", "List all basic feasible solutions of the exponent LP");
  vertices_cmd->add_option("problem", vertices_path, "Problem file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_path, analyze_json);
    if (*verify_cmd) return cmd_verify(vopt);
    if (*vertices_cmd) return cmd_vertices(vertices_path);
  } catch (const ProblemFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMathFailure;
  }
  return kInputError;
}
