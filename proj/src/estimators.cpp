#include "pollbounds/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace pollbounds {

namespace {

ClippedInterval clip_interval(Interval iv) {
  ClippedInterval out;
  out.clipped = iv.lo < 0.0 || iv.lo > 1.0 || iv.hi < 0.0 || iv.hi > 1.0;
  out.lo = std::clamp(iv.lo, 0.0, 1.0);
  out.hi = std::clamp(iv.hi, 0.0, 1.0);
  return out;
}

enum class RegimeKind { Level, Shift };

RegimeKind homogeneous_kind(const StratifiedPoll& poll) {
  bool any_shift = false;
  bool any_level = false;
  for (const auto& cell : poll.strata) {
    if (is_shift(cell.regime)) {
      any_shift = true;
    } else {
      any_level = true;
    }
  }
  if (any_shift && any_level) throw MixedRegimeKinds();
  return any_shift ? RegimeKind::Shift : RegimeKind::Level;
}

// Per-cell pieces of the stratified sums.
struct CellTerms {
  double share;        // P(x=xi)
  double rate;         // P(z=1|x=xi)
  double m;            // cell two-party share
  double bound_lo;     // lambda0 or delta0
  double bound_hi;     // lambda1 or delta1
  double nonresp_wt;   // (1-r_xi) P(x=xi)
  double mean_wt;      // r_xi P(x=xi) for level, P(x=xi) for shift
  double var_theta;    // variance-maximizing feasible theta1
  std::int64_t n;
};

std::vector<CellTerms> cell_terms(const StratifiedPoll& poll, RegimeKind kind) {
  std::vector<CellTerms> terms;
  terms.reserve(poll.strata.size());
  for (const auto& cell : poll.strata) {
    CellTerms t;
    t.share = cell.population_share;
    t.rate = cell.rate();
    t.m = two_party_share(cell.tally);
    t.n = cell.respondents;
    t.nonresp_wt = (1.0 - t.rate) * t.share;
    if (kind == RegimeKind::Level) {
      const Interval bounds = level_bounds(cell.regime);
      t.bound_lo = bounds.lo;
      t.bound_hi = bounds.hi;
      t.mean_wt = t.rate * t.share;
      t.var_theta = 0.5;  // theta1 unrestricted under level knowledge
    } else {
      const auto& shift = std::get<ShiftBound>(cell.regime);
      t.bound_lo = shift.delta0;
      t.bound_hi = shift.delta1;
      t.mean_wt = t.share;
      t.var_theta = variance_maximizing_theta1(cell.regime);
    }
    terms.push_back(t);
  }
  return terms;
}

}  // namespace

Interval identification_interval_unclipped(double m, double rate, const AssumptionRegime& regime) {
  validate_regime(regime);
  if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    return {m + shift->delta0 * (1.0 - rate), m + shift->delta1 * (1.0 - rate)};
  }
  const Interval bounds = level_bounds(regime);
  const double base = m * rate;
  return {base + bounds.lo * (1.0 - rate), base + bounds.hi * (1.0 - rate)};
}

ClippedInterval identification_interval(double m, double rate, const AssumptionRegime& regime) {
  return clip_interval(identification_interval_unclipped(m, rate, regime));
}

double midpoint_estimate_unclipped(double m, double rate, const AssumptionRegime& regime) {
  validate_regime(regime);
  if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    return m + 0.5 * (shift->delta0 + shift->delta1) * (1.0 - rate);
  }
  const Interval bounds = level_bounds(regime);
  return m * rate + 0.5 * (bounds.lo + bounds.hi) * (1.0 - rate);
}

MidpointEstimate midpoint_estimate(double m, double rate, const AssumptionRegime& regime) {
  const double value = midpoint_estimate_unclipped(m, rate, regime);
  MidpointEstimate out;
  out.clipped = value < 0.0 || value > 1.0;
  out.value = std::clamp(value, 0.0, 1.0);
  return out;
}

double max_squared_bias(double rate, const AssumptionRegime& regime) {
  validate_regime(regime);
  const double nonresponse = 1.0 - rate;
  double width = 0.0;
  if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    width = shift->delta1 - shift->delta0;
  } else {
    width = level_bounds(regime).width();
  }
  return 0.25 * width * width * nonresponse * nonresponse;
}

double variance_maximizing_theta1(const AssumptionRegime& regime) {
  const Interval feasible = feasible_theta1_range(regime);
  if (feasible.hi < 0.5) return feasible.hi;
  if (feasible.lo > 0.5) return feasible.lo;
  return 0.5;
}

double max_variance(double rate, std::int64_t n, const AssumptionRegime& regime) {
  if (n < 1) throw ValidationError("respondent count must be >= 1");
  validate_regime(regime);
  if (is_shift(regime)) {
    const double theta = variance_maximizing_theta1(regime);
    return theta * (1.0 - theta) / static_cast<double>(n);
  }
  return 0.25 * rate * rate / static_cast<double>(n);
}

double margin_of_sampling_error(std::int64_t n, double design_effect,
                                double confidence_multiplier) {
  if (n < 1) throw ValidationError("respondent count must be >= 1");
  if (design_effect < 1.0) throw ValidationError("design_effect must be >= 1");
  if (!(confidence_multiplier > 0.0)) throw ValidationError("confidence multiplier must be > 0");
  return confidence_multiplier * std::sqrt(design_effect * 0.25 / static_cast<double>(n));
}

double conventional_max_squared_bias(double m, double rate) {
  const double nonresponse = 1.0 - rate;
  const double toward_zero = m * nonresponse;
  const double toward_one = (1.0 - m) * nonresponse;
  return std::max(toward_zero * toward_zero, toward_one * toward_one);
}

ErrorBudget error_budget(const PollDesign& design, const ResponseTally& tally,
                         const AssumptionRegime& regime, double multiplier) {
  if (!(multiplier > 0.0)) throw ValidationError("tme multiplier must be > 0");
  design.validate();
  tally.validate();
  if (tally.total() != design.respondents) {
    throw ValidationError("tally total does not match the design's respondent count");
  }
  const double m = two_party_share(tally);
  const double rate = resolve_response_rate(design);

  ErrorBudget budget;
  const ClippedInterval interval = identification_interval(m, rate, regime);
  const MidpointEstimate midpoint = midpoint_estimate(m, rate, regime);
  budget.interval_lo = interval.lo;
  budget.interval_hi = interval.hi;
  budget.midpoint = midpoint.value;
  budget.clipped = interval.clipped || midpoint.clipped;
  budget.max_variance = max_variance(rate, design.respondents, regime);
  budget.max_squared_bias = max_squared_bias(rate, regime);
  budget.max_mse = budget.max_variance + budget.max_squared_bias;
  budget.multiplier = multiplier;
  budget.tme = multiplier * std::sqrt(budget.max_mse);
  budget.mose = margin_of_sampling_error(design.respondents, design.design_effect);
  return budget;
}

Interval stratified_interval_unclipped(const StratifiedPoll& poll) {
  poll.validate();
  const RegimeKind kind = homogeneous_kind(poll);
  const auto terms = cell_terms(poll, kind);
  double base = 0.0;
  double lo_part = 0.0;
  double hi_part = 0.0;
  for (const auto& t : terms) {
    base += t.m * t.mean_wt;
    lo_part += t.bound_lo * t.nonresp_wt;
    hi_part += t.bound_hi * t.nonresp_wt;
  }
  return {base + lo_part, base + hi_part};
}

ClippedInterval stratified_interval(const StratifiedPoll& poll) {
  return clip_interval(stratified_interval_unclipped(poll));
}

ErrorBudget stratified_budget(const StratifiedPoll& poll, double multiplier,
                              double design_effect) {
  if (!(multiplier > 0.0)) throw ValidationError("tme multiplier must be > 0");
  poll.validate();
  const RegimeKind kind = homogeneous_kind(poll);
  const auto terms = cell_terms(poll, kind);

  const Interval unclipped = stratified_interval_unclipped(poll);
  const double mid = unclipped.mid();

  double bias_sum = 0.0;     // sum_xi width_xi (1-r_xi) P(x=xi)
  double variance = 0.0;     // independent cells: sum of squared weighted terms
  std::int64_t n_total = 0;
  for (const auto& t : terms) {
    bias_sum += (t.bound_hi - t.bound_lo) * t.nonresp_wt;
    variance += t.mean_wt * t.mean_wt * t.var_theta * (1.0 - t.var_theta) /
                static_cast<double>(t.n);
    n_total += t.n;
  }

  ErrorBudget budget;
  const ClippedInterval interval = clip_interval(unclipped);
  budget.interval_lo = interval.lo;
  budget.interval_hi = interval.hi;
  budget.midpoint = std::clamp(mid, 0.0, 1.0);
  budget.clipped = interval.clipped || mid < 0.0 || mid > 1.0;
  budget.max_variance = variance;
  budget.max_squared_bias = 0.25 * bias_sum * bias_sum;
  budget.max_mse = budget.max_variance + budget.max_squared_bias;
  budget.multiplier = multiplier;
  budget.tme = multiplier * std::sqrt(budget.max_mse);
  budget.mose = margin_of_sampling_error(n_total, design_effect);
  return budget;
}

}  // namespace pollbounds
