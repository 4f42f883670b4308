#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pollbounds/estimators.hpp"
#include "pollbounds/oracle.hpp"
#include "pollbounds/report.hpp"
#include "pollbounds/spec_io.hpp"
#include "pollbounds/sweep.hpp"

namespace py = pybind11;
using namespace pollbounds;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Election poll error budgets under partial knowledge of nonresponse";

  static py::exception<InfeasibleShiftBound> infeasible(m, "InfeasibleShiftBoundError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InfeasibleShiftBound& e) {
      infeasible(e.what());
    } catch (const ValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Interval::lo)
      .def_readwrite("hi", &Interval::hi)
      .def("width", &Interval::width)
      .def("mid", &Interval::mid)
      .def("__repr__", [](const Interval& iv) {
        return "Interval(lo=" + std::to_string(iv.lo) + ", hi=" + std::to_string(iv.hi) + ")";
      });

  py::class_<PollDesign>(m, "PollDesign")
      .def(py::init([](std::int64_t respondents, std::optional<double> response_rate,
                       std::optional<std::int64_t> attempted_contacts, double design_effect) {
             PollDesign d;
             d.respondents = respondents;
             d.response_rate = response_rate;
             d.attempted_contacts = attempted_contacts;
             d.design_effect = design_effect;
             return d;
           }),
           py::arg("respondents"), py::arg("response_rate") = std::nullopt,
           py::arg("attempted_contacts") = std::nullopt, py::arg("design_effect") = 1.0)
      .def_readwrite("attempted_contacts", &PollDesign::attempted_contacts)
      .def_readwrite("respondents", &PollDesign::respondents)
      .def_readwrite("response_rate", &PollDesign::response_rate)
      .def_readwrite("design_effect", &PollDesign::design_effect)
      .def("validate", &PollDesign::validate);

  py::class_<ResponseTally>(m, "ResponseTally")
      .def(py::init([](std::int64_t count_a, std::int64_t count_b, std::int64_t count_dk_refused) {
             return ResponseTally{count_a, count_b, count_dk_refused};
           }),
           py::arg("count_a"), py::arg("count_b"), py::arg("count_dk_refused") = 0)
      .def_readwrite("count_a", &ResponseTally::count_a)
      .def_readwrite("count_b", &ResponseTally::count_b)
      .def_readwrite("count_dk_refused", &ResponseTally::count_dk_refused)
      .def("total", &ResponseTally::total);

  py::class_<NoKnowledge>(m, "NoKnowledge").def(py::init<>());

  py::class_<LevelBound>(m, "LevelBound")
      .def(py::init<double, double>(), py::arg("lambda0"), py::arg("lambda1"))
      .def_readwrite("lambda0", &LevelBound::lambda0)
      .def_readwrite("lambda1", &LevelBound::lambda1);

  py::class_<ShiftBound>(m, "ShiftBound")
      .def(py::init([](double delta0, double delta1, std::pair<double, double> respondent_range) {
             return ShiftBound{delta0, delta1, {respondent_range.first, respondent_range.second}};
           }),
           py::arg("delta0"), py::arg("delta1"),
           py::arg("respondent_range") = std::pair<double, double>{0.0, 1.0})
      .def_readwrite("delta0", &ShiftBound::delta0)
      .def_readwrite("delta1", &ShiftBound::delta1)
      .def_readwrite("respondent_range", &ShiftBound::respondent_range);

  py::class_<State>(m, "State")
      .def(py::init([](double theta1, double theta0) { return State{theta1, theta0}; }),
           py::arg("theta1"), py::arg("theta0"))
      .def_readwrite("theta1", &State::theta1)
      .def_readwrite("theta0", &State::theta0);

  py::class_<Stratum>(m, "Stratum")
      .def(py::init([](std::string label, double population_share, std::int64_t respondents,
                       ResponseTally tally, std::optional<double> response_rate,
                       std::optional<double> respondent_share, AssumptionRegime regime) {
             Stratum cell;
             cell.label = std::move(label);
             cell.population_share = population_share;
             cell.respondents = respondents;
             cell.tally = tally;
             cell.response_rate = response_rate;
             cell.respondent_share = respondent_share;
             cell.regime = std::move(regime);
             return cell;
           }),
           py::arg("label"), py::arg("population_share"), py::arg("respondents"), py::arg("tally"),
           py::arg("response_rate") = std::nullopt, py::arg("respondent_share") = std::nullopt,
           py::arg("regime") = AssumptionRegime{NoKnowledge{}})
      .def_readwrite("label", &Stratum::label)
      .def_readwrite("population_share", &Stratum::population_share)
      .def_readwrite("respondents", &Stratum::respondents)
      .def_readwrite("tally", &Stratum::tally)
      .def_readwrite("response_rate", &Stratum::response_rate)
      .def_readwrite("respondent_share", &Stratum::respondent_share)
      .def_readwrite("regime", &Stratum::regime);

  py::class_<StratifiedPoll>(m, "StratifiedPoll")
      .def(py::init([](std::vector<Stratum> strata) {
             StratifiedPoll poll;
             poll.strata = std::move(strata);
             return poll;
           }),
           py::arg("strata"))
      .def_readwrite("strata", &StratifiedPoll::strata)
      .def("validate", &StratifiedPoll::validate)
      .def("renormalize_shares", &StratifiedPoll::renormalize_shares);

  py::class_<ErrorBudget>(m, "ErrorBudget")
      .def_readonly("interval_lo", &ErrorBudget::interval_lo)
      .def_readonly("interval_hi", &ErrorBudget::interval_hi)
      .def_readonly("midpoint", &ErrorBudget::midpoint)
      .def_readonly("clipped", &ErrorBudget::clipped)
      .def_readonly("max_variance", &ErrorBudget::max_variance)
      .def_readonly("max_squared_bias", &ErrorBudget::max_squared_bias)
      .def_readonly("max_mse", &ErrorBudget::max_mse)
      .def_readonly("tme", &ErrorBudget::tme)
      .def_readonly("mose", &ErrorBudget::mose)
      .def_readonly("multiplier", &ErrorBudget::multiplier);

  py::class_<ClippedInterval>(m, "ClippedInterval")
      .def_readonly("lo", &ClippedInterval::lo)
      .def_readonly("hi", &ClippedInterval::hi)
      .def_readonly("clipped", &ClippedInterval::clipped);

  py::class_<MidpointEstimate>(m, "MidpointEstimate")
      .def_readonly("value", &MidpointEstimate::value)
      .def_readonly("clipped", &MidpointEstimate::clipped);

  // Core operations.
  m.def("two_party_share", &two_party_share, py::arg("tally"));
  m.def("resolve_response_rate", &resolve_response_rate, py::arg("design"));
  m.def("bayes_stratum_rate", &bayes_stratum_rate, py::arg("share_among_respondents"),
        py::arg("overall_rate"), py::arg("population_share"));
  m.def(
      "tally_from_percentages",
      [](double pct_a, double pct_b, double pct_dk_refused, std::int64_t respondents) {
        std::string warning;
        ResponseTally tally =
            tally_from_percentages(pct_a, pct_b, pct_dk_refused, respondents, &warning);
        return py::make_tuple(tally, warning);
      },
      py::arg("percent_a"), py::arg("percent_b"), py::arg("percent_dk_refused"),
      py::arg("respondents"), "Returns (tally, warning); warning is empty when clean.");

  // Estimators.
  m.def("identification_interval", &identification_interval, py::arg("m"), py::arg("rate"),
        py::arg("regime"));
  m.def("identification_interval_unclipped", &identification_interval_unclipped, py::arg("m"),
        py::arg("rate"), py::arg("regime"));
  m.def("midpoint_estimate", &midpoint_estimate, py::arg("m"), py::arg("rate"), py::arg("regime"));
  m.def("midpoint_estimate_unclipped", &midpoint_estimate_unclipped, py::arg("m"), py::arg("rate"),
        py::arg("regime"));
  m.def("max_squared_bias", &max_squared_bias, py::arg("rate"), py::arg("regime"));
  m.def("max_variance", &max_variance, py::arg("rate"), py::arg("n"), py::arg("regime"));
  m.def("variance_maximizing_theta1", &variance_maximizing_theta1, py::arg("regime"));
  m.def("margin_of_sampling_error", &margin_of_sampling_error, py::arg("n"),
        py::arg("design_effect") = 1.0, py::arg("confidence_multiplier") = 1.96);
  m.def("conventional_max_squared_bias", &conventional_max_squared_bias, py::arg("m"),
        py::arg("rate"));
  m.def("error_budget", &error_budget, py::arg("design"), py::arg("tally"), py::arg("regime"),
        py::arg("multiplier") = 1.0);
  m.def("stratified_interval", &stratified_interval, py::arg("poll"));
  m.def("stratified_interval_unclipped", &stratified_interval_unclipped, py::arg("poll"));
  m.def("stratified_budget", &stratified_budget, py::arg("poll"), py::arg("multiplier") = 1.0,
        py::arg("design_effect") = 1.0);

  // Oracle.
  py::class_<oracle::AffineEstimator>(m, "AffineEstimator")
      .def(py::init([](double slope, double offset) {
             return oracle::AffineEstimator{slope, offset};
           }),
           py::arg("slope"), py::arg("offset"))
      .def_readwrite("slope", &oracle::AffineEstimator::slope)
      .def_readwrite("offset", &oracle::AffineEstimator::offset);

  py::class_<oracle::MseBreakdown>(m, "MseBreakdown")
      .def_readonly("variance", &oracle::MseBreakdown::variance)
      .def_readonly("squared_bias", &oracle::MseBreakdown::squared_bias)
      .def_readonly("mse", &oracle::MseBreakdown::mse);

  py::class_<oracle::GridMaxResult>(m, "GridMaxResult")
      .def_readonly("max_mse", &oracle::GridMaxResult::max_mse)
      .def_readonly("argmax", &oracle::GridMaxResult::argmax);

  py::class_<oracle::OffsetScanResult>(m, "OffsetScanResult")
      .def_readonly("best_offset", &oracle::OffsetScanResult::best_offset)
      .def_readonly("best_max_mse", &oracle::OffsetScanResult::best_max_mse)
      .def_readonly("midpoint_offset", &oracle::OffsetScanResult::midpoint_offset)
      .def_readonly("midpoint_max_mse", &oracle::OffsetScanResult::midpoint_max_mse)
      .def_readonly("offset_step", &oracle::OffsetScanResult::offset_step);

  py::class_<oracle::MonteCarloResult>(m, "MonteCarloResult")
      .def_readonly("mse_estimate", &oracle::MonteCarloResult::mse_estimate)
      .def_readonly("standard_error", &oracle::MonteCarloResult::standard_error);

  py::class_<oracle::StratifiedGridMaxResult>(m, "StratifiedGridMaxResult")
      .def_readonly("max_mse", &oracle::StratifiedGridMaxResult::max_mse)
      .def_readonly("argmax", &oracle::StratifiedGridMaxResult::argmax);

  m.def("canonical_midpoint_estimator", &oracle::canonical_midpoint_estimator, py::arg("rate"),
        py::arg("regime"));
  m.def("exact_estimator_mse", &oracle::exact_estimator_mse, py::arg("state"),
        py::arg("estimator"), py::arg("n"), py::arg("rate"));
  m.def("grid_max_mse", &oracle::grid_max_mse, py::arg("regime"), py::arg("estimator"),
        py::arg("n"), py::arg("rate"), py::arg("grid_points") = 2001,
        py::call_guard<py::gil_scoped_release>());
  m.def("minimax_offset_scan", &oracle::minimax_offset_scan, py::arg("regime"), py::arg("n"),
        py::arg("rate"), py::arg("offset_grid") = 201, py::arg("state_grid_points") = 401,
        py::call_guard<py::gil_scoped_release>());
  m.def("monte_carlo_mse", &oracle::monte_carlo_mse, py::arg("state"), py::arg("estimator"),
        py::arg("n"), py::arg("rate"), py::arg("replications") = 100000, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("stratified_grid_max_mse", &oracle::stratified_grid_max_mse, py::arg("poll"),
        py::arg("grid_points"), py::call_guard<py::gil_scoped_release>());

  // Sweep and reports.
  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("delta", &SweepRow::delta)
      .def_readonly("midpoint", &SweepRow::midpoint)
      .def_readonly("tme", &SweepRow::tme)
      .def_readonly("band_lo", &SweepRow::band_lo)
      .def_readonly("band_hi", &SweepRow::band_hi)
      .def_readonly("conventional", &SweepRow::conventional)
      .def_readonly("mose", &SweepRow::mose)
      .def_readonly("conv_lo", &SweepRow::conv_lo)
      .def_readonly("conv_hi", &SweepRow::conv_hi);

  py::class_<SweepTable>(m, "SweepTable").def_readonly("rows", &SweepTable::rows);

  py::enum_<ReportFormat>(m, "ReportFormat")
      .value("json", ReportFormat::Json)
      .value("csv", ReportFormat::Csv);

  py::class_<PollSpec>(m, "PollSpec")
      .def_readwrite("design", &PollSpec::design)
      .def_readwrite("tally", &PollSpec::tally)
      .def_readwrite("regime", &PollSpec::regime)
      .def_readwrite("strata", &PollSpec::strata)
      .def_readonly("warnings", &PollSpec::warnings)
      .def("stratified", &PollSpec::stratified)
      .def("stratified_poll", &PollSpec::stratified_poll);

  py::class_<BudgetReport>(m, "BudgetReport")
      .def_readonly("spec", &BudgetReport::spec)
      .def_readonly("budget", &BudgetReport::budget)
      .def_readonly("two_party_share", &BudgetReport::two_party_share)
      .def_readonly("response_rate", &BudgetReport::response_rate)
      .def_readonly("rate_supplied", &BudgetReport::rate_supplied);

  m.def("tme_sweep", &tme_sweep, py::arg("design"), py::arg("tally"), py::arg("delta_max"),
        py::arg("steps"), py::arg("multiplier") = 1.0);
  m.def("parse_poll_spec", &parse_poll_spec, py::arg("json_text"));
  m.def("load_poll_spec", &load_poll_spec, py::arg("path"));
  m.def("make_budget_report", &make_budget_report, py::arg("spec"), py::arg("multiplier") = 1.0);
  m.def("emit_report",
        py::overload_cast<const BudgetReport&, ReportFormat>(&emit_report), py::arg("report"),
        py::arg("format") = ReportFormat::Json);
  m.def("emit_report", py::overload_cast<const SweepTable&, ReportFormat>(&emit_report),
        py::arg("table"), py::arg("format") = ReportFormat::Csv);
  m.def("parse_sweep_csv", &parse_sweep_csv, py::arg("text"));
}
