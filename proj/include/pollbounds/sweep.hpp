#pragma once

#include <cstdint>
#include <vector>

#include "pollbounds/poll.hpp"

namespace pollbounds {

struct SweepRow {
  double delta = 0.0;
  double midpoint = 0.0;      // equals the conventional estimate for symmetric deltas
  double tme = 0.0;
  double band_lo = 0.0;       // midpoint - tme
  double band_hi = 0.0;       // midpoint + tme
  double conventional = 0.0;  // two-party share m
  double mose = 0.0;
  double conv_lo = 0.0;       // conventional - mose
  double conv_hi = 0.0;       // conventional + mose
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// For delta on a uniform grid over [0, delta_max], evaluates the budget
/// under the symmetric shift bound [-delta, +delta]: the midpoint estimate
/// (which equals m), tme = multiplier*sqrt(max MSE), and the conventional
/// estimate with its margin of sampling error. Rows ascend in delta.
/// delta > 1/2 leaves no feasible respondent preference and propagates
/// InfeasibleShiftBound.
SweepTable tme_sweep(const PollDesign& design, const ResponseTally& tally, double delta_max,
                     int steps, double multiplier = 1.0);

}  // namespace pollbounds
