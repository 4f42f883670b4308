#include "pollbounds/oracle.hpp"

#include <cmath>
#include <limits>

#include "pollbounds/estimators.hpp"

namespace pollbounds::oracle {

namespace {

// Uniform grid including both endpoints; collapses to one point when the
// interval is degenerate.
std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw ValidationError("grid needs at least 1 point");
  if (hi <= lo) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double span = hi - lo;
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = lo + span * static_cast<double>(i) / (points - 1);
  }
  grid.back() = hi;
  return grid;
}

// splitmix64 finalizer; draw k of the stream keyed by `key` is mix(key + k*phi).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

struct CounterRng {
  std::uint64_t key;
  std::uint64_t counter = 0;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key(mix64(seed + kGolden) ^ mix64(stream * kGolden + kGolden)) {}

  double uniform() {  // [0,1)
    const std::uint64_t bits = mix64(key + (++counter) * kGolden);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
};

std::int64_t binomial_draw(CounterRng& rng, std::int64_t n, double p) {
  std::int64_t successes = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    successes += rng.uniform() < p ? 1 : 0;
  }
  return successes;
}

}  // namespace

AffineEstimator canonical_midpoint_estimator(double rate, const AssumptionRegime& regime) {
  validate_regime(regime);
  AffineEstimator est;
  if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    est.slope = 1.0;
    est.offset = 0.5 * (shift->delta0 + shift->delta1) * (1.0 - rate);
  } else {
    const Interval bounds = level_bounds(regime);
    est.slope = rate;
    est.offset = 0.5 * (bounds.lo + bounds.hi) * (1.0 - rate);
  }
  return est;
}

MseBreakdown exact_estimator_mse(const State& state, const AffineEstimator& estimator,
                                 std::int64_t n, double rate) {
  if (n < 1) throw ValidationError("respondent count must be >= 1");
  if (!(state.theta1 >= 0.0 && state.theta1 <= 1.0 && state.theta0 >= 0.0 && state.theta0 <= 1.0)) {
    throw ValidationError("state probabilities must lie in [0,1]");
  }
  MseBreakdown out;
  out.variance = estimator.slope * estimator.slope * state.theta1 * (1.0 - state.theta1) /
                 static_cast<double>(n);
  const double truth = state.theta1 * rate + state.theta0 * (1.0 - rate);
  const double bias = estimator.slope * state.theta1 + estimator.offset - truth;
  out.squared_bias = bias * bias;
  out.mse = out.variance + out.squared_bias;
  return out;
}

GridMaxResult grid_max_mse(const AssumptionRegime& regime, const AffineEstimator& estimator,
                           std::int64_t n, double rate, int grid_points) {
  if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
  validate_regime(regime);

  const Interval theta1_range = feasible_theta1_range(regime);
  const std::vector<double> theta1_grid = linspace(theta1_range.lo, theta1_range.hi, grid_points);

  // Second coordinate: theta0 itself for level-form regimes, the difference
  // theta0 - theta1 for shift bounds.
  const bool shift = is_shift(regime);
  Interval second_range;
  if (shift) {
    const auto& sb = std::get<ShiftBound>(regime);
    second_range = {sb.delta0, sb.delta1};
  } else {
    second_range = level_bounds(regime);
  }
  const std::vector<double> second_grid = linspace(second_range.lo, second_range.hi, grid_points);

  GridMaxResult best;
  best.max_mse = -std::numeric_limits<double>::infinity();
  for (double theta1 : theta1_grid) {
    for (double second : second_grid) {
      State state;
      state.theta1 = theta1;
      state.theta0 = shift ? theta1 + second : second;
      const double mse = exact_estimator_mse(state, estimator, n, rate).mse;
      if (mse > best.max_mse) {
        best.max_mse = mse;
        best.argmax = state;
      }
    }
  }
  return best;
}

OffsetScanResult minimax_offset_scan(const AssumptionRegime& regime, std::int64_t n, double rate,
                                     int offset_grid, int state_grid_points) {
  if (offset_grid < 3) throw ValidationError("offset_grid must be >= 3");
  validate_regime(regime);

  Interval bound = is_shift(regime) ? Interval{std::get<ShiftBound>(regime).delta0,
                                               std::get<ShiftBound>(regime).delta1}
                                    : level_bounds(regime);
  const double nonresponse = 1.0 - rate;
  const double slope = is_shift(regime) ? 1.0 : rate;
  const std::vector<double> offsets =
      linspace(bound.lo * nonresponse, bound.hi * nonresponse, offset_grid);

  OffsetScanResult result;
  result.offset_step = offsets.size() > 1 ? offsets[1] - offsets[0] : 0.0;
  result.midpoint_offset = canonical_midpoint_estimator(rate, regime).offset;

  double best = std::numeric_limits<double>::infinity();
  for (double offset : offsets) {
    const double max_mse = grid_max_mse(regime, {slope, offset}, n, rate, state_grid_points).max_mse;
    if (max_mse < best) {
      best = max_mse;
      result.best_offset = offset;
    }
  }
  result.best_max_mse = best;
  result.midpoint_max_mse =
      grid_max_mse(regime, {slope, result.midpoint_offset}, n, rate, state_grid_points).max_mse;
  return result;
}

MonteCarloResult monte_carlo_mse(const State& state, const AffineEstimator& estimator,
                                 std::int64_t n, double rate, std::int64_t replications,
                                 std::uint64_t seed) {
  if (replications < 100) throw ValidationError("replications must be >= 100");
  if (n < 1) throw ValidationError("respondent count must be >= 1");
  const double truth = state.theta1 * rate + state.theta0 * (1.0 - rate);

  // Welford accumulation in replication order keeps the reduction exact and
  // reproducible.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t rep = 0; rep < replications; ++rep) {
    CounterRng rng(seed, static_cast<std::uint64_t>(rep));
    const double m = static_cast<double>(binomial_draw(rng, n, state.theta1)) /
                     static_cast<double>(n);
    const double err = estimator.slope * m + estimator.offset - truth;
    const double sq = err * err;
    const double delta = sq - mean;
    mean += delta / static_cast<double>(rep + 1);
    m2 += delta * (sq - mean);
  }

  MonteCarloResult out;
  out.mse_estimate = mean;
  const double sample_var = m2 / static_cast<double>(replications - 1);
  out.standard_error = std::sqrt(sample_var / static_cast<double>(replications));
  return out;
}

StratifiedGridMaxResult stratified_grid_max_mse(const StratifiedPoll& poll, int grid_points) {
  if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
  poll.validate();
  if (poll.strata.size() > 3) throw TooManyStrataForOracle();

  const std::size_t cells = poll.strata.size();
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

  // Per-cell grids and weights. The estimate is
  //   sum_xi mean_wt_xi m_xi + offset,
  // so each cell contributes mean_wt^2 theta1(1-theta1)/N to the variance and
  // (half_width - coordinate) * (1-r) * share to the signed bias.
  struct CellGrid {
    std::vector<double> theta1;
    std::vector<double> second;  // theta0 for level cells, theta0-theta1 for shift cells
    double var_wt = 0.0;         // mean weight squared over N
    double bias_wt = 0.0;        // (1-r) * share
    double bias_center = 0.0;    // midpoint of the cell's bound
    bool shift = false;
  };
  std::vector<CellGrid> grids(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const Stratum& cell = poll.strata[i];
    CellGrid& g = grids[i];
    g.shift = is_shift(cell.regime);
    const Interval theta1_range = feasible_theta1_range(cell.regime);
    g.theta1 = linspace(theta1_range.lo, theta1_range.hi, grid_points);
    Interval bound;
    double mean_wt;
    const double rate = cell.rate();
    if (g.shift) {
      const auto& sb = std::get<ShiftBound>(cell.regime);
      bound = {sb.delta0, sb.delta1};
      mean_wt = cell.population_share;
    } else {
      bound = level_bounds(cell.regime);
      mean_wt = rate * cell.population_share;
    }
    g.second = linspace(bound.lo, bound.hi, grid_points);
    g.var_wt = mean_wt * mean_wt / static_cast<double>(cell.respondents);
    g.bias_wt = (1.0 - rate) * cell.population_share;
    g.bias_center = bound.mid();
  }

  StratifiedGridMaxResult best;
  best.max_mse = -std::numeric_limits<double>::infinity();
  best.argmax.resize(cells);
  std::vector<State> current(cells);

  // Depth-first product scan with running variance and signed-bias sums.
  auto scan = [&](auto&& self, std::size_t cell, double variance, double bias) -> void {
    if (cell == cells) {
      const double mse = variance + bias * bias;
      if (mse > best.max_mse) {
        best.max_mse = mse;
        best.argmax = current;
      }
      return;
    }
    const CellGrid& g = grids[cell];
    for (double theta1 : g.theta1) {
      const double cell_var = variance + g.var_wt * theta1 * (1.0 - theta1);
      for (double second : g.second) {
        current[cell].theta1 = theta1;
        current[cell].theta0 = g.shift ? theta1 + second : second;
        self(self, cell + 1, cell_var, bias + (g.bias_center - second) * g.bias_wt);
      }
    }
  };
  scan(scan, 0, 0.0, 0.0);
  return best;
}

std::vector<RatePoint> rate_sweep(const AssumptionRegime& regime, std::int64_t n, double rate_lo,
                                  double rate_hi, int steps, int grid_points) {
  if (steps < 2) throw ValidationError("rate sweep needs at least 2 steps");
  if (!(rate_lo > 0.0 && rate_lo <= rate_hi && rate_hi <= 1.0)) {
    throw ValidationError("rate sweep range must satisfy 0 < lo <= hi <= 1");
  }
  std::vector<RatePoint> points;
  points.reserve(static_cast<std::size_t>(steps));
  for (double rate : linspace(rate_lo, rate_hi, steps)) {
    const AffineEstimator est = canonical_midpoint_estimator(rate, regime);
    points.push_back({rate, grid_max_mse(regime, est, n, rate, grid_points).max_mse});
  }
  return points;
}

}  // namespace pollbounds::oracle
