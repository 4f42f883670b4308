#pragma once

#include <string>
#include <vector>

#include "pollbounds/poll.hpp"

// Poll spec documents: JSON files describing one poll. Field names are
// fixed; unknown fields are rejected. Proportions are fractions — any value
// above 1 in a proportion field is an error, never auto-scaled.
//
//   {
//     "design": {"attempted_contacts"?, "respondents", "response_rate"?, "design_effect"?},
//     "tally":  {"count_a", "count_b", "count_dk_refused"}
//             | {"percent_a", "percent_b", "percent_dk_refused"},
//     "regime": {"kind": "none" | "level" | "shift",
//                "lambda0"?, "lambda1"?, "delta0"?, "delta1"?, "respondent_range"?},
//     "strata"?: [{"label", "population_share", "respondents", "tally",
//                  "response_rate"? | "respondent_share"?, "regime"}]
//   }
//
// A stratum with "response_rate" uses it directly; one with
// "respondent_share" derives its rate by Bayes theorem from the design's
// overall rate. A stratum regime of kind "none" is stored as the level
// bound [0,1], which it equals.

namespace pollbounds {

struct SpecParseError : ValidationError {
  using ValidationError::ValidationError;
};

struct PollSpec {
  PollDesign design;
  ResponseTally tally;
  AssumptionRegime regime;
  std::vector<Stratum> strata;        // empty unless the file has "strata"
  std::string warnings;               // percent-conversion notes, empty if none

  bool stratified() const { return !strata.empty(); }
  StratifiedPoll stratified_poll() const;  // strata with rates resolved
};

PollSpec parse_poll_spec(const std::string& json_text);
PollSpec load_poll_spec(const std::string& path);

}  // namespace pollbounds
