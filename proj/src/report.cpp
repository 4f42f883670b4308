#include "pollbounds/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pollbounds/estimators.hpp"

namespace pollbounds {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string percent_string(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::string full_precision(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

ordered_json regime_json(const AssumptionRegime& regime) {
  ordered_json out;
  if (std::holds_alternative<NoKnowledge>(regime)) {
    out["kind"] = "none";
  } else if (const auto* level = std::get_if<LevelBound>(&regime)) {
    out["kind"] = "level";
    out["lambda0"] = level->lambda0;
    out["lambda1"] = level->lambda1;
  } else {
    const auto& shift = std::get<ShiftBound>(regime);
    out["kind"] = "shift";
    out["delta0"] = shift.delta0;
    out["delta1"] = shift.delta1;
    out["respondent_range"] = {shift.respondent_range.lo, shift.respondent_range.hi};
  }
  return out;
}

ordered_json tally_json(const ResponseTally& tally) {
  ordered_json out;
  out["count_a"] = tally.count_a;
  out["count_b"] = tally.count_b;
  out["count_dk_refused"] = tally.count_dk_refused;
  return out;
}

ordered_json budget_json(const ErrorBudget& budget) {
  ordered_json out;
  out["interval_lo"] = budget.interval_lo;
  out["interval_hi"] = budget.interval_hi;
  out["midpoint"] = budget.midpoint;
  out["clipped"] = budget.clipped;
  out["max_variance"] = budget.max_variance;
  out["max_squared_bias"] = budget.max_squared_bias;
  out["max_mse"] = budget.max_mse;
  out["tme"] = budget.tme;
  out["mose"] = budget.mose;
  out["multiplier"] = budget.multiplier;
  return out;
}

}  // namespace

BudgetReport make_budget_report(const PollSpec& spec, double multiplier) {
  BudgetReport report;
  report.spec = spec;
  report.two_party_share = two_party_share(spec.tally);
  report.rate_supplied = spec.design.response_rate.has_value();
  report.response_rate = resolve_response_rate(spec.design);
  if (spec.stratified()) {
    report.budget =
        stratified_budget(spec.stratified_poll(), multiplier, spec.design.design_effect);
  } else {
    report.budget = error_budget(spec.design, spec.tally, spec.regime, multiplier);
  }
  return report;
}

std::string emit_report(const BudgetReport& report, ReportFormat format) {
  if (format != ReportFormat::Json) {
    throw UnsupportedFormat("budget reports serialize to JSON only");
  }

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;

  ordered_json design;
  if (report.spec.design.attempted_contacts) {
    design["attempted_contacts"] = *report.spec.design.attempted_contacts;
  }
  design["respondents"] = report.spec.design.respondents;
  if (report.spec.design.response_rate) {
    design["response_rate"] = *report.spec.design.response_rate;
  }
  design["design_effect"] = report.spec.design.design_effect;

  ordered_json inputs;
  inputs["design"] = design;
  inputs["tally"] = tally_json(report.spec.tally);
  inputs["regime"] = regime_json(report.spec.regime);
  inputs["multiplier"] = report.budget.multiplier;
  if (report.spec.stratified()) {
    ordered_json strata = ordered_json::array();
    for (const auto& cell : report.spec.strata) {
      ordered_json c;
      c["label"] = cell.label;
      c["population_share"] = cell.population_share;
      c["respondents"] = cell.respondents;
      c["tally"] = tally_json(cell.tally);
      if (cell.response_rate) c["response_rate"] = *cell.response_rate;
      if (cell.respondent_share) c["respondent_share"] = *cell.respondent_share;
      c["regime"] = regime_json(cell.regime);
      strata.push_back(c);
    }
    inputs["strata"] = strata;
  }
  doc["inputs"] = inputs;

  ordered_json derived;
  derived["two_party_share"] = report.two_party_share;
  derived["response_rate"] = report.response_rate;
  derived["response_rate_source"] = report.rate_supplied ? "supplied" : "derived";
  if (report.spec.stratified()) {
    ordered_json cells = ordered_json::array();
    const StratifiedPoll poll = report.spec.stratified_poll();
    for (const auto& cell : poll.strata) {
      ordered_json c;
      c["label"] = cell.label;
      c["two_party_share"] = two_party_share(cell.tally);
      c["response_rate"] = cell.rate();
      cells.push_back(c);
    }
    derived["cells"] = cells;
  }
  if (!report.spec.warnings.empty()) derived["warnings"] = report.spec.warnings;
  doc["derived"] = derived;

  doc["budget"] = budget_json(report.budget);

  ordered_json percent;
  percent["interval_lo"] = percent_string(report.budget.interval_lo);
  percent["interval_hi"] = percent_string(report.budget.interval_hi);
  percent["midpoint"] = percent_string(report.budget.midpoint);
  percent["tme"] = percent_string(report.budget.tme);
  percent["mose"] = percent_string(report.budget.mose);
  doc["percent"] = percent;

  return doc.dump(2) + "\n";
}

std::string emit_report(const SweepTable& table, ReportFormat format) {
  if (format != ReportFormat::Csv) {
    throw UnsupportedFormat("sweep tables serialize to CSV only");
  }
  std::ostringstream out;
  out << "delta,midpoint,tme,band_lo,band_hi,conventional,mose,conv_lo,conv_hi\n";
  for (const SweepRow& row : table.rows) {
    out << full_precision(row.delta) << ',' << full_precision(row.midpoint) << ','
        << full_precision(row.tme) << ',' << full_precision(row.band_lo) << ','
        << full_precision(row.band_hi) << ',' << full_precision(row.conventional) << ','
        << full_precision(row.mose) << ',' << full_precision(row.conv_lo) << ','
        << full_precision(row.conv_hi) << '\n';
  }
  return out.str();
}

SweepTable parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "delta,midpoint,tme,band_lo,band_hi,conventional,mose,conv_lo,conv_hi") {
    throw ValidationError("sweep CSV: bad or missing header");
  }
  SweepTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    double values[9];
    for (int i = 0; i < 9; ++i) {
      if (!std::getline(fields, field, ',')) throw ValidationError("sweep CSV: short row");
      values[i] = std::stod(field);
    }
    if (std::getline(fields, field, ',')) throw ValidationError("sweep CSV: extra column");
    SweepRow row;
    row.delta = values[0];
    row.midpoint = values[1];
    row.tme = values[2];
    row.band_lo = values[3];
    row.band_hi = values[4];
    row.conventional = values[5];
    row.mose = values[6];
    row.conv_lo = values[7];
    row.conv_hi = values[8];
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace pollbounds
