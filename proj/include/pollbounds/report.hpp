#pragma once

#include <string>

#include "pollbounds/spec_io.hpp"
#include "pollbounds/sweep.hpp"

// Machine-readable report emission. Budgets serialize to JSON (all inputs
// echoed, every field at full precision, percent renderings at one decimal);
// sweep tables serialize to CSV with the fixed header
//   delta,midpoint,tme,band_lo,band_hi,conventional,mose,conv_lo,conv_hi
// and one newline-terminated row per delta, values at 17 significant
// digits. Identical inputs produce byte-identical documents.

namespace pollbounds {

enum class ReportFormat { Json, Csv };

struct BudgetReport {
  PollSpec spec;
  ErrorBudget budget;
  double two_party_share = 0.0;
  double response_rate = 0.0;
  bool rate_supplied = false;  // false when derived from attempted contacts
};

/// Computes the budget (stratified when the spec has strata) and bundles it
/// with the resolved inputs for serialization.
BudgetReport make_budget_report(const PollSpec& spec, double multiplier = 1.0);

std::string emit_report(const BudgetReport& report, ReportFormat format);
std::string emit_report(const SweepTable& table, ReportFormat format);

/// Inverse of the CSV emitter; round-trips every value exactly.
SweepTable parse_sweep_csv(const std::string& text);

}  // namespace pollbounds
