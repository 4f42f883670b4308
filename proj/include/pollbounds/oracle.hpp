#pragma once

#include <cstdint>
#include <vector>

#include "pollbounds/poll.hpp"

// Independent verification of the closed forms in estimators.hpp: exact
// binomial MSE at any state, brute-force maximization over the feasible
// state space, a minimax scan over alternative offsets, and Monte Carlo
// simulation of the sampling process.
//
// Everything here evaluates the unclipped affine estimator
//   p = slope * m + offset,
// matching the closed-form derivations. Grid and Monte Carlo scans are
// deterministic for given inputs; Monte Carlo randomness is a 64-bit
// counter stream keyed by (seed, replication index), so any partitioning of
// replications across workers reproduces the sequential draws exactly.

namespace pollbounds::oracle {

/// Affine estimator family p = slope*m + offset. slope = r with
/// offset = (1/2)(lambda0+lambda1)(1-r) is the level-form midpoint,
/// slope = 1 with offset = (1/2)(delta0+delta1)(1-r) the shift-form
/// midpoint, and slope = 1, offset = 0 the conventional estimate.
struct AffineEstimator {
  double slope = 1.0;
  double offset = 0.0;
};

/// The regime's own midpoint estimate written as an AffineEstimator.
AffineEstimator canonical_midpoint_estimator(double rate, const AssumptionRegime& regime);

struct MseBreakdown {
  double variance = 0.0;
  double squared_bias = 0.0;
  double mse = 0.0;
};

/// Exact finite-sample MSE of the estimator at one state: with N respondents
/// and m ~ Binomial(N, theta1)/N,
///   variance     = slope^2 theta1(1-theta1)/N
///   squared bias = (slope*theta1 + offset - P(y=1))^2
/// where P(y=1) = theta1*r + theta0*(1-r). No simulation involved.
MseBreakdown exact_estimator_mse(const State& state, const AffineEstimator& estimator,
                                 std::int64_t n, double rate);

struct GridMaxResult {
  double max_mse = 0.0;
  State argmax;
};

/// Maximizes exact_estimator_mse over a uniform grid on the feasible state
/// space: theta1 x theta0 on [0,1] x [lambda0,lambda1] for level-form
/// regimes, theta1 x (theta0-theta1) on the feasible range x [delta0,delta1]
/// for shift bounds. Scan order is fixed (ascending, strict improvement), so
/// results are deterministic.
GridMaxResult grid_max_mse(const AssumptionRegime& regime, const AffineEstimator& estimator,
                           std::int64_t n, double rate, int grid_points = 2001);

struct OffsetScanResult {
  double best_offset = 0.0;
  double best_max_mse = 0.0;
  double midpoint_offset = 0.0;
  double midpoint_max_mse = 0.0;
  double offset_step = 0.0;
};

/// Scans the estimator offset over a uniform grid spanning the feasible
/// offsets (bound_lo*(1-r) .. bound_hi*(1-r)) at the regime's canonical
/// slope, computing the grid max MSE for each. Ties break toward the
/// smallest offset. The midpoint offset should come out within one grid
/// step of the best one.
OffsetScanResult minimax_offset_scan(const AssumptionRegime& regime, std::int64_t n, double rate,
                                     int offset_grid = 201, int state_grid_points = 401);

struct MonteCarloResult {
  double mse_estimate = 0.0;
  double standard_error = 0.0;
};

/// Simulates m ~ Binomial(n, theta1)/n and averages the squared estimator
/// error against P(y=1). Reproducible for a given seed regardless of how
/// replications would be partitioned.
MonteCarloResult monte_carlo_mse(const State& state, const AffineEstimator& estimator,
                                 std::int64_t n, double rate, std::int64_t replications = 100000,
                                 std::uint64_t seed = 0);

struct StratifiedGridMaxResult {
  double max_mse = 0.0;
  std::vector<State> argmax;  // one state per cell
};

/// Brute-force maximum of the exact MSE of the stratified midpoint estimate
/// over the product of per-cell feasible state grids, using independence of
/// the cell proportions for the variance term. At most 3 strata; the state
/// space has 2 grid dimensions per cell.
StratifiedGridMaxResult stratified_grid_max_mse(const StratifiedPoll& poll, int grid_points);

struct RatePoint {
  double rate = 0.0;
  double max_mse = 0.0;
};

/// Grid-oracle max MSE of the canonical midpoint estimate as the response
/// rate sweeps [rate_lo, rate_hi]. Diagnostic: documents the empirically
/// observed monotonicity region rather than asserting one.
std::vector<RatePoint> rate_sweep(const AssumptionRegime& regime, std::int64_t n, double rate_lo,
                                  double rate_hi, int steps, int grid_points = 201);

}  // namespace pollbounds::oracle
