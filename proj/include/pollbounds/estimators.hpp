#pragma once

#include "pollbounds/poll.hpp"

// Closed-form identification intervals, midpoint estimates, worst-case
// variance/bias/MSE, total margin of error, and margin of sampling error,
// for unstratified and stratified polls.
//
// All worst-case quantities refer to the unclipped midpoint estimator; the
// clipped values are what reports display, the unclipped ones are what the
// minimax derivations assume.

namespace pollbounds {

struct ClippedInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool clipped = false;
};

struct MidpointEstimate {
  double value = 0.0;
  bool clipped = false;
};

/// Identification interval for P(y=1) before clipping:
///   no knowledge: [m*r, m*r + (1-r)]
///   level bound : [m*r + lambda0*(1-r), m*r + lambda1*(1-r)]
///   shift bound : [m + delta0*(1-r),    m + delta1*(1-r)]
Interval identification_interval_unclipped(double m, double rate, const AssumptionRegime& regime);

/// The interval above with each end clipped into [0,1]; the flag records
/// whether clipping occurred.
ClippedInterval identification_interval(double m, double rate, const AssumptionRegime& regime);

/// Center of the unclipped identification interval; minimizes maximum
/// squared bias over the regime's state space.
double midpoint_estimate_unclipped(double m, double rate, const AssumptionRegime& regime);

MidpointEstimate midpoint_estimate(double m, double rate, const AssumptionRegime& regime);

/// Worst-case squared bias of the (unclipped) midpoint estimate:
///   no knowledge: (1/4)(1-r)^2
///   level bound : (1/4)(lambda1-lambda0)^2 (1-r)^2
///   shift bound : (1/4)(delta1-delta0)^2 (1-r)^2
double max_squared_bias(double rate, const AssumptionRegime& regime);

/// Feasible theta1 = P(y=1|z=1) that maximizes sampling variance: the
/// feasible value nearest 1/2, ties broken toward the lower value.
double variance_maximizing_theta1(const AssumptionRegime& regime);

/// Worst-case sampling variance of the midpoint estimate. The no-knowledge
/// and level-bound estimates weight m by r, giving r^2/(4N); the shift-bound
/// estimate weights m by 1, giving theta*(1-theta*)/N at the feasible theta1
/// nearest 1/2.
double max_variance(double rate, std::int64_t n, const AssumptionRegime& regime);

/// Conventional margin of sampling error:
/// confidence_multiplier * sqrt(design_effect * (1/4) / n).
double margin_of_sampling_error(std::int64_t n, double design_effect = 1.0,
                                double confidence_multiplier = 1.96);

/// Worst-case squared bias of the conventional estimate m itself under no
/// knowledge, at fixed theta1 = m: max of [m(1-r)]^2 and [(1-m)(1-r)]^2.
/// Never below the midpoint's (1/4)(1-r)^2; equal only at m = 1/2.
double conventional_max_squared_bias(double m, double rate);

/// Assembles the full budget for one poll: interval, midpoint, worst-case
/// variance/bias/MSE, tme = multiplier*sqrt(max_mse), and the conventional
/// mose = 1.96*sqrt(design_effect/(4N)) for comparison.
ErrorBudget error_budget(const PollDesign& design, const ResponseTally& tally,
                         const AssumptionRegime& regime, double multiplier = 1.0);

// --- Stratified analogues ---
// All cells must share one regime kind; the level form weights cell shares
// m_xi by the cell response rate, the shift form weights them by 1.

Interval stratified_interval_unclipped(const StratifiedPoll& poll);
ClippedInterval stratified_interval(const StratifiedPoll& poll);

/// Budget for the stratified midpoint estimate. Maximum squared bias is
///   (1/4)[sum_xi (width_xi)(1-r_xi)P(x=xi)]^2
/// and maximum variance sums the independent cells,
///   sum_xi w_xi^2 theta*_xi(1-theta*_xi)/N_xi
/// with w_xi = r_xi P(x=xi) for level cells and w_xi = P(x=xi) for shift
/// cells. mose uses N = sum_xi N_xi.
ErrorBudget stratified_budget(const StratifiedPoll& poll, double multiplier = 1.0,
                              double design_effect = 1.0);

}  // namespace pollbounds
