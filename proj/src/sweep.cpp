#include "pollbounds/sweep.hpp"

#include "pollbounds/estimators.hpp"

namespace pollbounds {

SweepTable tme_sweep(const PollDesign& design, const ResponseTally& tally, double delta_max,
                     int steps, double multiplier) {
  if (!(delta_max > 0.0 && delta_max <= 1.0)) {
    throw ValidationError("delta_max must lie in (0,1]");
  }
  if (steps < 2) throw ValidationError("sweep needs at least 2 steps");
  if (!(multiplier > 0.0)) throw ValidationError("tme multiplier must be > 0");
  design.validate();

  const double m = two_party_share(tally);
  const double mose = margin_of_sampling_error(design.respondents, design.design_effect);

  SweepTable table;
  table.rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double delta = delta_max * static_cast<double>(i) / (steps - 1);
    const AssumptionRegime regime = ShiftBound{-delta, delta, {0.0, 1.0}};
    const ErrorBudget budget = error_budget(design, tally, regime, multiplier);

    SweepRow row;
    row.delta = delta;
    row.midpoint = midpoint_estimate_unclipped(m, resolve_response_rate(design), regime);
    row.tme = budget.tme;
    row.band_lo = row.midpoint - row.tme;
    row.band_hi = row.midpoint + row.tme;
    row.conventional = m;
    row.mose = mose;
    row.conv_lo = m - mose;
    row.conv_hi = m + mose;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace pollbounds
