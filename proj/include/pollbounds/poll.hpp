#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Domain types for two-candidate polls with nonresponse, plus the derived
// quantities (two-party share, response rates) every estimator consumes.
// All proportions are fractions in [0,1]; percent rendering happens only at
// the report boundary.

namespace pollbounds {

// Base of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent inputs. The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

struct ZeroTwoPartyTotal : ValidationError {
  ZeroTwoPartyTotal() : ValidationError("two-party total is zero: count_a + count_b must be >= 1") {}
};

struct MissingRateInputs : ValidationError {
  MissingRateInputs()
      : ValidationError("cannot resolve response rate: supply response_rate or attempted_contacts") {}
};

struct RateOutOfRange : ValidationError {
  explicit RateOutOfRange(double rate)
      : ValidationError("response rate " + std::to_string(rate) + " outside (0, 1]") {}
};

struct ZeroPopulationShare : ValidationError {
  ZeroPopulationShare() : ValidationError("population_share must be positive") {}
};

struct ImpliedRateOutOfRange : ValidationError {
  explicit ImpliedRateOutOfRange(double rate)
      : ValidationError("Bayes-implied cell response rate " + std::to_string(rate) +
                        " exceeds 1; inputs are inconsistent") {}
};

struct MixedRegimeKinds : ValidationError {
  MixedRegimeKinds()
      : ValidationError("strata mix level and shift regimes; all cells must share one kind") {}
};

struct SharesDoNotSumToOne : ValidationError {
  explicit SharesDoNotSumToOne(double sum)
      : ValidationError("stratum population shares sum to " + std::to_string(sum) +
                        ", not 1 (tolerance 1e-9)") {}
};

struct TooManyStrataForOracle : ValidationError {
  TooManyStrataForOracle()
      : ValidationError("stratified grid oracle supports at most 3 strata") {}
};

struct UnsupportedFormat : ValidationError {
  explicit UnsupportedFormat(const std::string& what) : ValidationError(what) {}
};

// Regime whose feasible respondent-preference range is empty. Exit code 3.
struct InfeasibleShiftBound : Error {
  InfeasibleShiftBound()
      : Error("shift bound leaves no feasible respondent preference: "
              "[max(0,-delta0), min(1,1-delta1)] intersected with the respondent range is empty") {}
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Sampling facts for one poll: contact attempts, respondent count N,
/// response rate P(z=1), and the design effect applied inside the margin of
/// sampling error.
struct PollDesign {
  std::optional<std::int64_t> attempted_contacts;
  std::int64_t respondents = 0;
  std::optional<double> response_rate;  // P(z=1); derived from attempts when absent
  double design_effect = 1.0;

  void validate() const;
};

/// Raw answer counts. Don't-know/refused is retained for reporting but
/// excluded from the two-party share.
struct ResponseTally {
  std::int64_t count_a = 0;
  std::int64_t count_b = 0;
  std::int64_t count_dk_refused = 0;

  std::int64_t total() const { return count_a + count_b + count_dk_refused; }
  void validate() const;
};

// --- Assumption regimes: what the pollster knows about non-respondents ---

/// Nothing is known: P(y=1|z=0) may be anywhere in [0,1].
struct NoKnowledge {};

/// P(y=1|z=0) lies in [lambda0, lambda1].
struct LevelBound {
  double lambda0 = 0.0;
  double lambda1 = 1.0;
};

/// P(y=1|z=0) - P(y=1|z=1) lies in [delta0, delta1]. The respondent range
/// optionally restricts the feasible P(y=1|z=1); it constrains the state
/// space used for worst-case error, not the observed sample share.
struct ShiftBound {
  double delta0 = 0.0;
  double delta1 = 0.0;
  Interval respondent_range{0.0, 1.0};
};

using AssumptionRegime = std::variant<NoKnowledge, LevelBound, ShiftBound>;

/// Throws ValidationError on bad bound ordering or out-of-range values, and
/// InfeasibleShiftBound when the feasible respondent range is empty.
void validate_regime(const AssumptionRegime& regime);

/// Feasible values of theta1 = P(y=1|z=1) under the regime:
/// [max(0,-delta0), min(1,1-delta1)] intersected with the respondent range
/// for shift bounds, [0,1] otherwise. Throws InfeasibleShiftBound if empty.
Interval feasible_theta1_range(const AssumptionRegime& regime);

/// Non-respondent level bounds implied by the regime for interval/bias
/// arithmetic: [0,1] under no knowledge, [lambda0,lambda1] for level bounds.
/// Not defined for shift bounds.
Interval level_bounds(const AssumptionRegime& regime);

bool is_shift(const AssumptionRegime& regime);

/// One point of the state space S: respondent and non-respondent preference.
struct State {
  double theta1 = 0.0;  // P(y=1|z=1)
  double theta0 = 0.0;  // P(y=1|z=0)
};

/// Per-covariate-cell data. response_rate is P(z=1|x=xi), either supplied or
/// resolved via Bayes from the cell's share among respondents.
struct Stratum {
  std::string label;
  double population_share = 0.0;                // P(x=xi)
  std::int64_t respondents = 0;                 // N_xi
  ResponseTally tally;
  std::optional<double> response_rate;          // P(z=1|x=xi)
  std::optional<double> respondent_share;       // P(x=xi|z=1), input to Bayes
  AssumptionRegime regime;

  double rate() const;  // throws ValidationError when unresolved
};

struct StratifiedPoll {
  std::vector<Stratum> strata;

  void validate() const;
  // Explicit opt-in: silent renormalization hides input errors.
  void renormalize_shares();
};

/// Everything a poll report carries: the identification interval, the
/// midpoint estimate, worst-case variance/bias/MSE, the total margin of
/// error tme = multiplier * sqrt(max_mse), and the conventional margin of
/// sampling error for comparison.
struct ErrorBudget {
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  double midpoint = 0.0;
  bool clipped = false;  // interval end or midpoint fell outside [0,1]
  double max_variance = 0.0;
  double max_squared_bias = 0.0;
  double max_mse = 0.0;
  double tme = 0.0;
  double mose = 0.0;
  double multiplier = 1.0;
};

// --- Core operations ---

/// Two-party share m = count_a / (count_a + count_b); don't-know/refused
/// excluded. Throws ZeroTwoPartyTotal when both counts are zero.
double two_party_share(const ResponseTally& tally);

/// Supplied rate if present, else respondents / attempted_contacts. No
/// rounding is applied internally.
double resolve_response_rate(const PollDesign& design);

/// Cell response rate by Bayes theorem:
/// P(z=1|x=xi) = P(x=xi|z=1) * P(z=1) / P(x=xi).
double bayes_stratum_rate(double share_among_respondents, double overall_rate,
                          double population_share);

/// Converts percentage tallies to counts by rounding percent*N/100 to the
/// nearest integer. Appends to *warning when the percents do not sum to
/// 100 +- 0.1 or when a rounding residual had to be folded into a count so
/// the tally total matches N.
ResponseTally tally_from_percentages(double pct_a, double pct_b, double pct_dk_refused,
                                     std::int64_t respondents,
                                     std::string* warning = nullptr);

}  // namespace pollbounds
