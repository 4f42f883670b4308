#include "pollbounds/poll.hpp"

#include <cmath>
#include <sstream>

namespace pollbounds {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

bool is_proportion(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void PollDesign::validate() const {
  require(respondents >= 1, "respondents must be >= 1");
  require(design_effect >= 1.0, "design_effect must be >= 1");
  if (response_rate) {
    if (!(*response_rate > 0.0 && *response_rate <= 1.0)) throw RateOutOfRange(*response_rate);
  }
  if (attempted_contacts) {
    require(*attempted_contacts >= 1, "attempted_contacts must be >= 1");
    if (!response_rate) {
      require(respondents <= *attempted_contacts,
              "respondents exceed attempted_contacts; cannot derive a response rate");
    }
  }
}

void ResponseTally::validate() const {
  require(count_a >= 0 && count_b >= 0 && count_dk_refused >= 0, "tally counts must be >= 0");
}

double Stratum::rate() const {
  if (!response_rate) {
    throw ValidationError("stratum '" + label + "' has no resolved response rate");
  }
  return *response_rate;
}

void validate_regime(const AssumptionRegime& regime) {
  if (const auto* level = std::get_if<LevelBound>(&regime)) {
    require(is_proportion(level->lambda0) && is_proportion(level->lambda1),
            "lambda bounds must lie in [0,1]");
    require(level->lambda0 <= level->lambda1, "lambda bounds out of order: lambda0 > lambda1");
  } else if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    require(shift->delta0 >= -1.0 && shift->delta1 <= 1.0, "delta bounds must lie in [-1,1]");
    require(shift->delta0 <= shift->delta1, "delta bounds out of order: delta0 > delta1");
    require(is_proportion(shift->respondent_range.lo) && is_proportion(shift->respondent_range.hi) &&
                shift->respondent_range.lo <= shift->respondent_range.hi,
            "respondent_range must be an interval inside [0,1]");
    feasible_theta1_range(regime);  // throws InfeasibleShiftBound if empty
  }
}

Interval feasible_theta1_range(const AssumptionRegime& regime) {
  if (const auto* shift = std::get_if<ShiftBound>(&regime)) {
    // theta0 = theta1 + d must be a proper probability for every d in
    // [delta0, delta1], which pins theta1 to [max(0,-delta0), min(1,1-delta1)].
    const double lo = std::max({0.0, -shift->delta0, shift->respondent_range.lo});
    const double hi = std::min({1.0, 1.0 - shift->delta1, shift->respondent_range.hi});
    if (lo > hi) throw InfeasibleShiftBound();
    return {lo, hi};
  }
  return {0.0, 1.0};
}

Interval level_bounds(const AssumptionRegime& regime) {
  if (std::holds_alternative<NoKnowledge>(regime)) return {0.0, 1.0};
  if (const auto* level = std::get_if<LevelBound>(&regime)) return {level->lambda0, level->lambda1};
  throw ValidationError("level bounds are undefined for a shift regime");
}

bool is_shift(const AssumptionRegime& regime) {
  return std::holds_alternative<ShiftBound>(regime);
}

void StratifiedPoll::validate() const {
  require(!strata.empty(), "stratified poll has no strata");
  double share_sum = 0.0;
  for (const auto& cell : strata) {
    require(cell.population_share > 0.0, "stratum '" + cell.label + "': population_share must be > 0");
    require(cell.respondents >= 1, "stratum '" + cell.label + "': respondents must be >= 1");
    cell.tally.validate();
    require(cell.tally.total() == cell.respondents,
            "stratum '" + cell.label + "': tally total does not match respondents");
    const double r = cell.rate();
    if (!(r > 0.0 && r <= 1.0)) throw RateOutOfRange(r);
    validate_regime(cell.regime);
    share_sum += cell.population_share;
  }
  if (std::abs(share_sum - 1.0) > 1e-9) throw SharesDoNotSumToOne(share_sum);
}

void StratifiedPoll::renormalize_shares() {
  double share_sum = 0.0;
  for (const auto& cell : strata) share_sum += cell.population_share;
  require(share_sum > 0.0, "cannot renormalize: shares sum to zero");
  for (auto& cell : strata) cell.population_share /= share_sum;
}

double two_party_share(const ResponseTally& tally) {
  tally.validate();
  const std::int64_t two_party = tally.count_a + tally.count_b;
  if (two_party == 0) throw ZeroTwoPartyTotal();
  return static_cast<double>(tally.count_a) / static_cast<double>(two_party);
}

double resolve_response_rate(const PollDesign& design) {
  design.validate();
  if (design.response_rate) return *design.response_rate;
  if (!design.attempted_contacts) throw MissingRateInputs();
  const double rate =
      static_cast<double>(design.respondents) / static_cast<double>(*design.attempted_contacts);
  if (!(rate > 0.0 && rate <= 1.0)) throw RateOutOfRange(rate);
  return rate;
}

double bayes_stratum_rate(double share_among_respondents, double overall_rate,
                          double population_share) {
  if (population_share <= 0.0) throw ZeroPopulationShare();
  if (!(share_among_respondents > 0.0 && share_among_respondents <= 1.0))
    throw ValidationError("share_among_respondents must lie in (0,1]");
  if (!(overall_rate > 0.0 && overall_rate <= 1.0)) throw RateOutOfRange(overall_rate);
  if (population_share > 1.0) throw ValidationError("population_share must lie in (0,1]");
  const double rate = share_among_respondents * overall_rate / population_share;
  if (rate > 1.0) throw ImpliedRateOutOfRange(rate);
  return rate;
}

ResponseTally tally_from_percentages(double pct_a, double pct_b, double pct_dk_refused,
                                     std::int64_t respondents, std::string* warning) {
  for (double p : {pct_a, pct_b, pct_dk_refused}) {
    require(p >= 0.0 && p <= 100.0, "percentages must lie in [0,100]");
  }
  require(respondents >= 1, "respondents must be >= 1");

  std::ostringstream note;
  const double pct_sum = pct_a + pct_b + pct_dk_refused;
  if (std::abs(pct_sum - 100.0) > 0.1) {
    note << "percentages sum to " << pct_sum << ", not 100 +- 0.1";
  }

  const double n = static_cast<double>(respondents);
  ResponseTally tally;
  tally.count_a = std::llround(pct_a * n / 100.0);
  tally.count_b = std::llround(pct_b * n / 100.0);
  tally.count_dk_refused = std::llround(pct_dk_refused * n / 100.0);

  // Rounding can leave the total off by a count or two; fold the residual
  // into don't-know/refused (or the larger candidate count) so the tally
  // stays consistent with N.
  const std::int64_t residual = respondents - tally.total();
  if (residual != 0) {
    if (note.tellp() > 0) note << "; ";
    note << "rounding residual of " << residual << " folded into ";
    if (tally.count_dk_refused + residual >= 0) {
      tally.count_dk_refused += residual;
      note << "count_dk_refused";
    } else if (tally.count_a >= tally.count_b) {
      tally.count_a += residual;
      note << "count_a";
    } else {
      tally.count_b += residual;
      note << "count_b";
    }
  }
  tally.validate();
  require(tally.total() == respondents, "percent conversion could not match respondent count");

  if (warning && note.tellp() > 0) {
    if (!warning->empty()) *warning += "; ";
    *warning += note.str();
  }
  return tally;
}

}  // namespace pollbounds
