#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pollbounds/estimators.hpp"
#include "pollbounds/oracle.hpp"
#include "pollbounds/report.hpp"
#include "pollbounds/spec_io.hpp"
#include "pollbounds/sweep.hpp"

// Exit codes: 0 success, 2 input validation, 3 infeasible regime,
// 4 oracle disagreement. Reports go to --out or stdout; stderr carries
// diagnostics only.

namespace {

using namespace pollbounds;

constexpr double kGridTolerance = 1e-4;   // grid vs closed-form max MSE
constexpr double kExceedTolerance = 1e-12;  // grid may never exceed the closed form
constexpr double kMonteCarloSigma = 3.0;  // standard-error multiples

void write_output(const std::string& document, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << document;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + out_path);
  out << document;
}

void print_rate_diagnostics(const PollSpec& spec, double rate, bool supplied) {
  std::fprintf(stderr, "resolved response rate: %.17g (%s)\n", rate,
               supplied ? "supplied" : "derived from attempted contacts");
  if (!spec.warnings.empty()) std::fprintf(stderr, "warning: %s\n", spec.warnings.c_str());
}

int run_report(const std::string& spec_path, double multiplier, const std::string& format,
               const std::string& out_path) {
  const PollSpec spec = load_poll_spec(spec_path);
  const BudgetReport report = make_budget_report(spec, multiplier);
  print_rate_diagnostics(spec, report.response_rate, report.rate_supplied);
  const ReportFormat fmt = format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  write_output(emit_report(report, fmt), out_path);
  return 0;
}

int run_sweep(const std::string& spec_path, double delta_max, int steps, double multiplier,
              const std::string& out_path) {
  const PollSpec spec = load_poll_spec(spec_path);
  print_rate_diagnostics(spec, resolve_response_rate(spec.design), spec.design.response_rate.has_value());
  const SweepTable table = tme_sweep(spec.design, spec.tally, delta_max, steps, multiplier);
  write_output(emit_report(table, ReportFormat::Csv), out_path);
  return 0;
}

bool report_check(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  return pass;
}

__attribute__((format(printf, 1, 2))) std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// Non-failing diagnostic: where the worst-case MSE of the midpoint estimate
// stops decreasing as the response rate rises. The observed region is
// reported alongside N*width^2, the simple predictor of whether wider
// knowledge gaps make more response worthwhile.
void print_rate_monotonicity(const AssumptionRegime& regime, std::int64_t n) {
  const auto points = oracle::rate_sweep(regime, n, 0.005, 0.9, 24, 201);
  double switch_rate = points.back().rate;
  bool decreasing_everywhere = true;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].max_mse > points[i - 1].max_mse) {
      switch_rate = points[i - 1].rate;
      decreasing_everywhere = false;
      break;
    }
  }
  double width = 1.0;
  if (const auto* level = std::get_if<LevelBound>(&regime)) {
    width = level->lambda1 - level->lambda0;
  } else if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    width = shift->delta1 - shift->delta0;
  }
  const double predictor = static_cast<double>(n) * width * width;
  if (decreasing_everywhere) {
    std::printf("INFO rate-monotonicity: max MSE decreasing in rate across [0.005, 0.9] "
                "(N=%lld, N*width^2=%.3g)\n",
                static_cast<long long>(n), predictor);
  } else {
    std::printf("INFO rate-monotonicity: max MSE decreasing up to rate ~%.3f, increasing beyond "
                "(N=%lld, N*width^2=%.3g)\n",
                switch_rate, static_cast<long long>(n), predictor);
  }
}

int run_oracle_check(const std::string& spec_path, int grid, int offsets, std::uint64_t seed,
                     std::int64_t reps) {
  const PollSpec spec = load_poll_spec(spec_path);
  const double rate = resolve_response_rate(spec.design);
  const std::int64_t n = spec.design.respondents;
  validate_regime(spec.regime);

  bool all_pass = true;

  // 1. Brute-force grid max vs the closed-form budget.
  const double closed =
      max_variance(rate, n, spec.regime) + max_squared_bias(rate, spec.regime);
  const oracle::AffineEstimator midpoint = oracle::canonical_midpoint_estimator(rate, spec.regime);
  const oracle::GridMaxResult grid_result =
      oracle::grid_max_mse(spec.regime, midpoint, n, rate, grid);
  const double gap = closed - grid_result.max_mse;
  all_pass &= report_check(
      "grid-vs-closed-form",
      std::abs(gap) <= kGridTolerance && grid_result.max_mse <= closed + kExceedTolerance,
      fmt("closed=%.10g grid=%.10g gap=%.3g (tol %.0e)", closed, grid_result.max_mse, gap,
          kGridTolerance));

  // 2. Offset scan: the midpoint offset should be minimax up to grid resolution.
  const oracle::OffsetScanResult scan = oracle::minimax_offset_scan(spec.regime, n, rate, offsets);
  const double offset_gap = std::abs(scan.best_offset - scan.midpoint_offset);
  all_pass &= report_check("minimax-offset", offset_gap <= scan.offset_step + kExceedTolerance,
                           fmt("best=%.10g midpoint=%.10g step=%.3g", scan.best_offset,
                               scan.midpoint_offset, scan.offset_step));

  // 3. Monte Carlo at the grid argmax state vs the exact closed form.
  const oracle::MseBreakdown exact =
      oracle::exact_estimator_mse(grid_result.argmax, midpoint, n, rate);
  const oracle::MonteCarloResult mc =
      oracle::monte_carlo_mse(grid_result.argmax, midpoint, n, rate, reps, seed);
  const double mc_gap = std::abs(mc.mse_estimate - exact.mse);
  all_pass &= report_check(
      "monte-carlo",
      mc_gap <= kMonteCarloSigma * mc.standard_error + kExceedTolerance,
      fmt("exact=%.10g mc=%.10g se=%.3g gap=%.3g (tol %gse)", exact.mse, mc.mse_estimate,
          mc.standard_error, mc_gap, kMonteCarloSigma));

  // 4. Stratified budget vs the stratified grid oracle when strata exist.
  if (spec.stratified()) {
    const StratifiedPoll poll = spec.stratified_poll();
    const int cell_grid = poll.strata.size() >= 3 ? std::min(grid, 21) : std::min(grid, 101);
    const ErrorBudget budget = stratified_budget(poll);
    const oracle::StratifiedGridMaxResult strat =
        oracle::stratified_grid_max_mse(poll, cell_grid);
    const double strat_gap = budget.max_mse - strat.max_mse;
    all_pass &= report_check(
        "stratified-budget-vs-grid",
        std::abs(strat_gap) <= kGridTolerance && strat.max_mse <= budget.max_mse + kExceedTolerance,
        fmt("closed=%.10g grid=%.10g gap=%.3g (cells=%zu grid=%d)", budget.max_mse, strat.max_mse,
            strat_gap, poll.strata.size(), cell_grid));
  }

  print_rate_monotonicity(spec.regime, n);
  return all_pass ? 0 : 4;
}

}  // namespace

namespace {

int run(int argc, char** argv) {
  CLI::App app{"Election poll error budgets under partial knowledge of nonresponse"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::string format = "json";
  double multiplier = 1.0;
  double delta_max = 0.5;
  int steps = 101;
  int grid = 2001;
  int offsets = 201;
  std::uint64_t seed = 20240701;
  std::int64_t reps = 100000;

  CLI::App* report = app.add_subcommand("report", "Error budget for one poll spec");
  report->add_option("spec", spec_path, "poll spec JSON file")->required();
  report->add_option("--multiplier", multiplier, "scale applied to sqrt(max MSE)");
  report->add_option("--format", format, "json")->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "TME as a function of the symmetric shift delta");
  sweep->add_option("spec", spec_path, "poll spec JSON file")->required();
  sweep->add_option("--delta-max", delta_max, "largest delta (default 0.5)");
  sweep->add_option("--steps", steps, "rows in the sweep (default 101)");
  sweep->add_option("--multiplier", multiplier, "scale applied to sqrt(max MSE)");
  sweep->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* oracle_check =
      app.add_subcommand("oracle-check", "Brute-force verification of the closed forms");
  oracle_check->add_option("spec", spec_path, "poll spec JSON file")->required();
  oracle_check->add_option("--grid", grid, "state grid points per dimension (default 2001)");
  oracle_check->add_option("--offsets", offsets, "offset grid points (default 201)");
  oracle_check->add_option("--seed", seed, "Monte Carlo seed");
  oracle_check->add_option("--reps", reps, "Monte Carlo replications (default 100000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (report->parsed()) return run_report(spec_path, multiplier, format, out_path);
    if (sweep->parsed()) return run_sweep(spec_path, delta_max, steps, multiplier, out_path);
    return run_oracle_check(spec_path, grid, offsets, seed, reps);
  } catch (const InfeasibleShiftBound& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (...) {
    std::fprintf(stderr, "error: unexpected failure\n");
    return 2;
  }
}
