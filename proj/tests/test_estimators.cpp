#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pollbounds/estimators.hpp"

using namespace pollbounds;

namespace {

// Reference poll throughout: m = 0.544, rate = 0.014, N = 1532.
constexpr double kM = 0.544;
constexpr double kRate = 0.014;
constexpr std::int64_t kN = 1532;

PollDesign reference_design() { return {.respondents = kN, .response_rate = kRate}; }
ResponseTally reference_tally() { return {544, 456, 532}; }  // two-party total 1000

// Spreadsheet-style evaluation of the stratified level-bound interval:
// every term written out, no shared code with the implementation.
Interval hand_level_interval(const std::vector<double>& share, const std::vector<double>& m,
                             const std::vector<double>& rate, const std::vector<double>& lam0,
                             const std::vector<double>& lam1) {
  double base = 0.0, lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < share.size(); ++i) {
    base += m[i] * rate[i] * share[i];
    lo += lam0[i] * (1.0 - rate[i]) * share[i];
    hi += lam1[i] * (1.0 - rate[i]) * share[i];
  }
  return {base + lo, base + hi};
}

}  // namespace

TEST_CASE("identification interval, no knowledge") {
  const ClippedInterval iv = identification_interval(kM, kRate, NoKnowledge{});
  CHECK(iv.lo == doctest::Approx(0.544 * 0.014).epsilon(1e-12));       // 0.007616
  CHECK(iv.hi == doctest::Approx(0.544 * 0.014 + 0.986).epsilon(1e-12));  // 0.993616
  CHECK(iv.hi - iv.lo == doctest::Approx(0.986).epsilon(1e-12));
  CHECK_FALSE(iv.clipped);

  const ClippedInterval point = identification_interval(0.42, 1.0, NoKnowledge{});
  CHECK(point.lo == 0.42);
  CHECK(point.hi == 0.42);
}

TEST_CASE("identification interval, level bound") {
  const ClippedInterval iv = identification_interval(kM, kRate, LevelBound{0.3, 0.7});
  CHECK(iv.hi - iv.lo == doctest::Approx(0.4 * 0.986).epsilon(1e-12));  // 0.3944
}

TEST_CASE("identification interval, shift bound clips and flags") {
  const ClippedInterval iv = identification_interval(0.95, 0.1, ShiftBound{0.0, 0.2, {0.0, 0.8}});
  CHECK(iv.hi == 1.0);  // unclipped hi = 0.95 + 0.2*0.9 = 1.13
  CHECK(iv.clipped);
  const Interval raw = identification_interval_unclipped(0.95, 0.1, ShiftBound{0.0, 0.2, {0.0, 0.8}});
  CHECK(raw.hi == doctest::Approx(1.13).epsilon(1e-12));
}

TEST_CASE("midpoint estimates") {
  CHECK(midpoint_estimate(kM, kRate, NoKnowledge{}).value ==
        doctest::Approx(0.500616).epsilon(1e-12));
  CHECK(midpoint_estimate(kM, kRate, ShiftBound{-0.1, 0.0, {0.0, 1.0}}).value ==
        doctest::Approx(0.4947).epsilon(1e-12));
  // Symmetric deltas reproduce the conventional estimate.
  CHECK(midpoint_estimate(kM, kRate, ShiftBound{-0.05, 0.05, {0.0, 1.0}}).value == kM);
}

TEST_CASE("midpoint equals the interval centre for every regime") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    const double m = unif(rng);
    const double rate = 0.005 + 0.995 * unif(rng);
    AssumptionRegime regime;
    switch (i % 3) {
      case 0: regime = NoKnowledge{}; break;
      case 1: {
        double a = unif(rng), b = unif(rng);
        regime = LevelBound{std::min(a, b), std::max(a, b)};
        break;
      }
      default: {
        double a = unif(rng) - 0.5, b = unif(rng) - 0.5;
        if (a > b) std::swap(a, b);
        if (b - a > 1.0) continue;
        regime = ShiftBound{a, b, {0.0, 1.0}};
        break;
      }
    }
    const Interval iv = identification_interval_unclipped(m, rate, regime);
    CHECK(midpoint_estimate_unclipped(m, rate, regime) ==
          doctest::Approx(iv.mid()).epsilon(1e-12));
  }
}

TEST_CASE("max squared bias") {
  CHECK(max_squared_bias(kRate, LevelBound{0.3, 0.7}) ==
        doctest::Approx(0.03888784).epsilon(1e-12));
  CHECK(max_squared_bias(kRate, ShiftBound{-0.1, 0.0, {0.0, 1.0}}) ==
        doctest::Approx(0.0024304899999999997).epsilon(1e-10));
  CHECK(max_squared_bias(0.37, LevelBound{0.55, 0.55}) == 0.0);
  CHECK(max_squared_bias(kRate, NoKnowledge{}) == doctest::Approx(0.25 * 0.986 * 0.986));
}

TEST_CASE("max variance") {
  CHECK(max_variance(kRate, kN, NoKnowledge{}) ==
        doctest::Approx(0.25 * 0.014 * 0.014 / 1532.0).epsilon(1e-12));  // ~3.2e-8
  // Feasible respondent preference bounded away from 1/2.
  CHECK(max_variance(kRate, kN, ShiftBound{-0.1, 0.0, {0.6, 1.0}}) ==
        doctest::Approx(0.6 * 0.4 / 1532.0).epsilon(1e-12));  // ~1.567e-4
  CHECK(max_variance(1.0, 4, NoKnowledge{}) == doctest::Approx(1.0 / 16.0));
  // Shift bound with 1/2 feasible.
  CHECK(max_variance(kRate, kN, ShiftBound{-0.1, 0.0, {0.0, 1.0}}) ==
        doctest::Approx(0.25 / 1532.0).epsilon(1e-12));
}

TEST_CASE("variance-maximizing theta1 sits nearest 1/2") {
  CHECK(variance_maximizing_theta1(NoKnowledge{}) == 0.5);
  CHECK(variance_maximizing_theta1(ShiftBound{-0.1, 0.0, {0.6, 1.0}}) == 0.6);
  CHECK(variance_maximizing_theta1(ShiftBound{0.0, 0.8, {0.0, 1.0}}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(variance_maximizing_theta1(ShiftBound{-0.2, 0.1, {0.0, 1.0}}) == 0.5);
}

TEST_CASE("margin of sampling error") {
  CHECK(margin_of_sampling_error(1532) == doctest::Approx(0.025037830385072204).epsilon(1e-12));
  CHECK(margin_of_sampling_error(1532, 1.22) == doctest::Approx(0.027655187569022324).epsilon(1e-12));
  CHECK(margin_of_sampling_error(800) == doctest::Approx(0.03464823227814083).epsilon(1e-12));
  CHECK(margin_of_sampling_error(1000, 1.0, 1.645) ==
        doctest::Approx(1.645 * std::sqrt(0.25 / 1000.0)).epsilon(1e-12));
  CHECK_THROWS_AS(margin_of_sampling_error(0), ValidationError);
  CHECK_THROWS_AS(margin_of_sampling_error(100, 0.5), ValidationError);
}

TEST_CASE("conventional estimate has weakly larger max squared bias") {
  for (double r : {0.014, 0.3, 0.9}) {
    CHECK(conventional_max_squared_bias(0.5, r) == max_squared_bias(r, NoKnowledge{}));
  }
  CHECK(conventional_max_squared_bias(1.0, 0.5) == doctest::Approx(0.25));
  CHECK(conventional_max_squared_bias(kM, kRate) ==
        doctest::Approx(0.2877077954560001).epsilon(1e-12));
  // Strictly larger away from 1/2.
  CHECK(conventional_max_squared_bias(kM, kRate) > max_squared_bias(kRate, NoKnowledge{}));
}

TEST_CASE("error budget reproduces the reference poll") {
  SUBCASE("no knowledge") {
    const ErrorBudget b = error_budget(reference_design(), reference_tally(), NoKnowledge{});
    CHECK(b.midpoint == doctest::Approx(0.500616).epsilon(1e-12));
    CHECK(b.tme == doctest::Approx(0.49300003243847174).epsilon(1e-12));
    CHECK(b.mose == doctest::Approx(0.025037830385072204).epsilon(1e-12));
    CHECK(b.max_mse == b.max_variance + b.max_squared_bias);
    CHECK(b.multiplier == 1.0);
    CHECK_FALSE(b.clipped);
  }
  SUBCASE("level bound 0.3..0.7") {
    const ErrorBudget b = error_budget(reference_design(), reference_tally(), LevelBound{0.3, 0.7});
    CHECK(b.tme == doctest::Approx(0.19720008109616538).epsilon(1e-12));
    CHECK(b.midpoint == doctest::Approx(0.500616).epsilon(1e-12));  // symmetric bound
  }
  SUBCASE("shift bound -0.1..0") {
    const ErrorBudget b =
        error_budget(reference_design(), reference_tally(), ShiftBound{-0.1, 0.0, {0.0, 1.0}});
    CHECK(b.max_mse == doctest::Approx(0.0025936753785900783).epsilon(1e-12));
    CHECK(b.tme == doctest::Approx(0.05092813935919983).epsilon(1e-12));
    CHECK(b.midpoint == doctest::Approx(0.4947).epsilon(1e-12));
  }
  SUBCASE("multiplier scales the tme only") {
    const ErrorBudget one = error_budget(reference_design(), reference_tally(), NoKnowledge{}, 1.0);
    const ErrorBudget big = error_budget(reference_design(), reference_tally(), NoKnowledge{}, 1.96);
    CHECK(big.tme == doctest::Approx(1.96 * one.tme).epsilon(1e-15));
    CHECK(big.max_mse == one.max_mse);
    CHECK(big.multiplier == 1.96);
  }
  SUBCASE("tally must match the design") {
    CHECK_THROWS_AS(error_budget({.respondents = 999, .response_rate = 0.014}, reference_tally(),
                                 NoKnowledge{}),
                    ValidationError);
  }
}

TEST_CASE("level bounds symmetric about 1/2 reproduce the no-knowledge midpoint") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double m = unif(rng);
    const double rate = 0.01 + 0.99 * unif(rng);
    const double lam0 = 0.5 * unif(rng);
    const double none = midpoint_estimate_unclipped(m, rate, NoKnowledge{});
    const double sym = midpoint_estimate_unclipped(m, rate, LevelBound{lam0, 1.0 - lam0});
    CHECK(sym == doctest::Approx(none).epsilon(1e-12));
  }
}

TEST_CASE("nested bounds give nested intervals and no larger bias") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double m = unif(rng);
    const double rate = 0.01 + 0.99 * unif(rng);
    double outer_lo = unif(rng), outer_hi = unif(rng);
    if (outer_lo > outer_hi) std::swap(outer_lo, outer_hi);
    const double inner_lo = outer_lo + (outer_hi - outer_lo) * 0.25;
    const double inner_hi = outer_hi - (outer_hi - outer_lo) * 0.25;
    const Interval outer = identification_interval_unclipped(m, rate, LevelBound{outer_lo, outer_hi});
    const Interval inner = identification_interval_unclipped(m, rate, LevelBound{inner_lo, inner_hi});
    CHECK(inner.lo >= outer.lo - 1e-15);
    CHECK(inner.hi <= outer.hi + 1e-15);
    CHECK(max_squared_bias(rate, LevelBound{inner_lo, inner_hi}) <=
          max_squared_bias(rate, LevelBound{outer_lo, outer_hi}) + 1e-15);
  }
}

TEST_CASE("stratified interval: single stratum reduces to the unstratified one") {
  Stratum cell;
  cell.label = "all";
  cell.population_share = 1.0;
  cell.respondents = kN;
  cell.tally = reference_tally();
  cell.response_rate = kRate;
  cell.regime = LevelBound{0.3, 0.7};
  StratifiedPoll poll{{cell}};

  const ClippedInterval strat = stratified_interval(poll);
  const ClippedInterval flat = identification_interval(kM, kRate, LevelBound{0.3, 0.7});
  CHECK(strat.lo == doctest::Approx(flat.lo).epsilon(1e-15));
  CHECK(strat.hi == doctest::Approx(flat.hi).epsilon(1e-15));

  const ErrorBudget sb = stratified_budget(poll);
  const ErrorBudget fb = error_budget(reference_design(), reference_tally(), LevelBound{0.3, 0.7});
  CHECK(sb.midpoint == doctest::Approx(fb.midpoint).epsilon(1e-15));
  CHECK(sb.max_variance == doctest::Approx(fb.max_variance).epsilon(1e-15));
  CHECK(sb.max_squared_bias == doctest::Approx(fb.max_squared_bias).epsilon(1e-15));
  CHECK(sb.tme == doctest::Approx(fb.tme).epsilon(1e-15));
  CHECK(sb.mose == doctest::Approx(fb.mose).epsilon(1e-15));
}

TEST_CASE("stratified interval: two level cells against hand evaluation") {
  const std::vector<double> share{0.6, 0.4}, m{0.5, 0.6}, rate{0.02, 0.01};
  const std::vector<double> lam0{0.4, 0.2}, lam1{0.6, 0.8};

  StratifiedPoll poll;
  for (int i = 0; i < 2; ++i) {
    Stratum cell;
    cell.label = i == 0 ? "urban" : "rural";
    cell.population_share = share[i];
    cell.respondents = 500;
    cell.tally = i == 0 ? ResponseTally{250, 250, 0} : ResponseTally{300, 200, 0};
    cell.response_rate = rate[i];
    cell.regime = LevelBound{lam0[i], lam1[i]};
    poll.strata.push_back(cell);
  }

  const Interval expected = hand_level_interval(share, m, rate, lam0, lam1);
  CHECK(expected.lo == doctest::Approx(0.3228).epsilon(1e-12));
  CHECK(expected.hi == doctest::Approx(0.678).epsilon(1e-12));

  const ClippedInterval actual = stratified_interval(poll);
  CHECK(actual.lo == doctest::Approx(expected.lo).epsilon(1e-15));
  CHECK(actual.hi == doctest::Approx(expected.hi).epsilon(1e-15));

  const ErrorBudget budget = stratified_budget(poll);
  CHECK(budget.midpoint == doctest::Approx(0.5004).epsilon(1e-12));
  CHECK(budget.max_squared_bias == doctest::Approx(0.03154176).epsilon(1e-12));
  CHECK(budget.max_variance == doctest::Approx(8e-8).epsilon(1e-12));
  CHECK(budget.max_mse == budget.max_variance + budget.max_squared_bias);
}

TEST_CASE("stratified shift cells") {
  auto shift_cell = [](const char* label, double share, std::int64_t n, ResponseTally tally,
                       double rate, double d0, double d1) {
    Stratum cell;
    cell.label = label;
    cell.population_share = share;
    cell.respondents = n;
    cell.tally = tally;
    cell.response_rate = rate;
    cell.regime = ShiftBound{d0, d1, {0.0, 1.0}};
    return cell;
  };

  SUBCASE("all deltas zero degenerate to the weighted cell estimate") {
    StratifiedPoll poll;
    poll.strata = {shift_cell("a", 0.5, 500, {275, 225, 0}, 0.02, 0.0, 0.0),
                   shift_cell("b", 0.5, 500, {240, 260, 0}, 0.03, 0.0, 0.0)};
    const ClippedInterval iv = stratified_interval(poll);
    const double weighted = 0.5 * (275.0 / 500.0) + 0.5 * (240.0 / 500.0);
    CHECK(iv.lo == doctest::Approx(weighted).epsilon(1e-15));
    CHECK(iv.hi == doctest::Approx(weighted).epsilon(1e-15));
    const ErrorBudget budget = stratified_budget(poll);
    CHECK(budget.max_squared_bias == 0.0);
    CHECK(budget.midpoint == doctest::Approx(weighted).epsilon(1e-15));
    // Missing at random: max MSE is the weighting variance alone.
    CHECK(budget.max_mse == budget.max_variance);
  }
  SUBCASE("equal shares, 1/2 feasible: variance is sum of squared share terms") {
    StratifiedPoll poll;
    poll.strata = {shift_cell("a", 0.5, 500, {275, 225, 0}, 0.02, -0.1, 0.1),
                   shift_cell("b", 0.5, 500, {240, 260, 0}, 0.03, -0.1, 0.1)};
    const ErrorBudget budget = stratified_budget(poll);
    CHECK(budget.max_variance == doctest::Approx(0.25 * (0.25 / 500.0 + 0.25 / 500.0)).epsilon(1e-12));
  }
}

TEST_CASE("stratifying without knowledge buys nothing") {
  // Cells that all carry the vacuous bound [0,1] reproduce the pooled
  // no-knowledge interval for the aggregate m and r; weighting by
  // attributes cannot narrow it.
  StratifiedPoll poll;
  Stratum a;
  a.label = "a";
  a.population_share = 0.6;
  a.respondents = 500;
  a.tally = {250, 250, 0};
  a.response_rate = 0.02;
  a.regime = LevelBound{0.0, 1.0};
  Stratum b = a;
  b.label = "b";
  b.population_share = 0.4;
  b.tally = {300, 200, 0};
  b.response_rate = 0.01;
  poll.strata = {a, b};

  const double overall_rate = 0.02 * 0.6 + 0.01 * 0.4;                      // 0.016
  const double overall_m = (0.5 * 0.02 * 0.6 + 0.6 * 0.01 * 0.4) / overall_rate;  // 0.525
  const Interval pooled =
      identification_interval_unclipped(overall_m, overall_rate, NoKnowledge{});
  const Interval strat = stratified_interval_unclipped(poll);
  CHECK(strat.lo == doctest::Approx(pooled.lo).epsilon(1e-12));
  CHECK(strat.hi == doctest::Approx(pooled.hi).epsilon(1e-12));
  CHECK(strat.width() == doctest::Approx(1.0 - overall_rate).epsilon(1e-12));
}

TEST_CASE("per-cell bounds narrower on average beat the pooled bound") {
  // Pooled knowledge: non-respondent preference in [0.2, 0.8]. Cell-level
  // knowledge narrows one big cell to [0.45, 0.55].
  StratifiedPoll poll;
  Stratum a;
  a.label = "known";
  a.population_share = 0.7;
  a.respondents = 700;
  a.tally = {350, 350, 0};
  a.response_rate = 0.02;
  a.regime = LevelBound{0.45, 0.55};
  Stratum b = a;
  b.label = "open";
  b.population_share = 0.3;
  b.respondents = 300;
  b.tally = {160, 140, 0};
  b.regime = LevelBound{0.2, 0.8};
  poll.strata = {a, b};

  const double pooled = max_squared_bias(0.02, LevelBound{0.2, 0.8});
  CHECK(stratified_budget(poll).max_squared_bias < pooled);
}

TEST_CASE("mixed regime kinds are rejected") {
  StratifiedPoll poll;
  Stratum level;
  level.label = "level";
  level.population_share = 0.5;
  level.respondents = 100;
  level.tally = {50, 50, 0};
  level.response_rate = 0.02;
  level.regime = LevelBound{0.3, 0.7};
  Stratum shift = level;
  shift.label = "shift";
  shift.regime = ShiftBound{-0.1, 0.1, {0.0, 1.0}};
  poll.strata = {level, shift};
  CHECK_THROWS_AS(stratified_interval(poll), MixedRegimeKinds);
  CHECK_THROWS_AS(stratified_budget(poll), MixedRegimeKinds);
}
