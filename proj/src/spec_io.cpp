#include "pollbounds/spec_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pollbounds {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw SpecParseError(message); }

void reject_unknown_fields(const json& obj, const char* context,
                           std::initializer_list<const char*> known) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* field : known) {
      if (item.key() == field) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(std::string(context) + ": unknown field '" + item.key() + "'");
  }
}

const json& require_field(const json& obj, const char* context, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) fail(std::string(context) + ": missing required field '" + field + "'");
  return *it;
}

std::int64_t parse_count(const json& value, const char* context, const char* field) {
  if (!value.is_number_integer()) fail(std::string(context) + ": '" + field + "' must be an integer");
  return value.get<std::int64_t>();
}

double parse_number(const json& value, const char* context, const char* field) {
  if (!value.is_number()) fail(std::string(context) + ": '" + field + "' must be a number");
  return value.get<double>();
}

// Fractions only: a proportion above 1 is rejected, never rescaled.
double parse_proportion(const json& value, const char* context, const char* field) {
  const double x = parse_number(value, context, field);
  if (x > 1.0) {
    fail(std::string(context) + ": '" + field + "' is " + std::to_string(x) +
         "; proportions are fractions in [0,1], not percents");
  }
  if (x < 0.0) fail(std::string(context) + ": '" + field + "' must be >= 0");
  return x;
}

PollDesign parse_design(const json& obj) {
  if (!obj.is_object()) fail("design: must be an object");
  reject_unknown_fields(obj, "design",
                        {"attempted_contacts", "respondents", "response_rate", "design_effect"});
  PollDesign design;
  design.respondents = parse_count(require_field(obj, "design", "respondents"), "design", "respondents");
  if (obj.contains("attempted_contacts")) {
    design.attempted_contacts = parse_count(obj["attempted_contacts"], "design", "attempted_contacts");
  }
  if (obj.contains("response_rate")) {
    design.response_rate = parse_proportion(obj["response_rate"], "design", "response_rate");
  }
  if (obj.contains("design_effect")) {
    design.design_effect = parse_number(obj["design_effect"], "design", "design_effect");
  }
  return design;
}

ResponseTally parse_tally(const json& obj, std::int64_t respondents, std::string* warnings,
                          const char* context) {
  if (!obj.is_object()) fail(std::string(context) + ": must be an object");
  const bool counts = obj.contains("count_a") || obj.contains("count_b") ||
                      obj.contains("count_dk_refused");
  const bool percents = obj.contains("percent_a") || obj.contains("percent_b") ||
                        obj.contains("percent_dk_refused");
  if (counts && percents) fail(std::string(context) + ": mix of count_* and percent_* fields");

  if (percents) {
    reject_unknown_fields(obj, context, {"percent_a", "percent_b", "percent_dk_refused"});
    const double pa = parse_number(require_field(obj, context, "percent_a"), context, "percent_a");
    const double pb = parse_number(require_field(obj, context, "percent_b"), context, "percent_b");
    const double pdk =
        obj.contains("percent_dk_refused") ? parse_number(obj["percent_dk_refused"], context, "percent_dk_refused") : 0.0;
    return tally_from_percentages(pa, pb, pdk, respondents, warnings);
  }

  reject_unknown_fields(obj, context, {"count_a", "count_b", "count_dk_refused"});
  ResponseTally tally;
  tally.count_a = parse_count(require_field(obj, context, "count_a"), context, "count_a");
  tally.count_b = parse_count(require_field(obj, context, "count_b"), context, "count_b");
  if (obj.contains("count_dk_refused")) {
    tally.count_dk_refused = parse_count(obj["count_dk_refused"], context, "count_dk_refused");
  }
  return tally;
}

Interval parse_range(const json& value, const char* context, const char* field) {
  if (!value.is_array() || value.size() != 2) {
    fail(std::string(context) + ": '" + field + "' must be a [lo, hi] pair");
  }
  Interval range;
  range.lo = parse_proportion(value[0], context, field);
  range.hi = parse_proportion(value[1], context, field);
  return range;
}

AssumptionRegime parse_regime(const json& obj, const char* context) {
  if (!obj.is_object()) fail(std::string(context) + ": must be an object");
  const json& kind_field = require_field(obj, context, "kind");
  if (!kind_field.is_string()) fail(std::string(context) + ": 'kind' must be a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "none") {
    reject_unknown_fields(obj, context, {"kind"});
    return NoKnowledge{};
  }
  if (kind == "level") {
    reject_unknown_fields(obj, context, {"kind", "lambda0", "lambda1"});
    LevelBound level;
    level.lambda0 = parse_proportion(require_field(obj, context, "lambda0"), context, "lambda0");
    level.lambda1 = parse_proportion(require_field(obj, context, "lambda1"), context, "lambda1");
    return level;
  }
  if (kind == "shift") {
    reject_unknown_fields(obj, context, {"kind", "delta0", "delta1", "respondent_range"});
    ShiftBound shift;
    shift.delta0 = parse_number(require_field(obj, context, "delta0"), context, "delta0");
    shift.delta1 = parse_number(require_field(obj, context, "delta1"), context, "delta1");
    if (obj.contains("respondent_range")) {
      shift.respondent_range = parse_range(obj["respondent_range"], context, "respondent_range");
    }
    return shift;
  }
  fail(std::string(context) + ": 'kind' must be \"none\", \"level\" or \"shift\", got \"" + kind + "\"");
}

Stratum parse_stratum(const json& obj, std::size_t index, std::string* warnings) {
  const std::string context = "strata[" + std::to_string(index) + "]";
  if (!obj.is_object()) fail(context + ": must be an object");
  reject_unknown_fields(obj, context.c_str(),
                        {"label", "population_share", "respondents", "tally", "response_rate",
                         "respondent_share", "regime"});
  Stratum cell;
  const json& label = require_field(obj, context.c_str(), "label");
  if (!label.is_string()) fail(context + ": 'label' must be a string");
  cell.label = label.get<std::string>();
  cell.population_share = parse_proportion(require_field(obj, context.c_str(), "population_share"),
                                           context.c_str(), "population_share");
  cell.respondents = parse_count(require_field(obj, context.c_str(), "respondents"),
                                 context.c_str(), "respondents");
  cell.tally = parse_tally(require_field(obj, context.c_str(), "tally"), cell.respondents, warnings,
                           context.c_str());
  if (obj.contains("response_rate") && obj.contains("respondent_share")) {
    fail(context + ": give response_rate or respondent_share, not both");
  }
  if (obj.contains("response_rate")) {
    cell.response_rate = parse_proportion(obj["response_rate"], context.c_str(), "response_rate");
  }
  if (obj.contains("respondent_share")) {
    cell.respondent_share = parse_proportion(obj["respondent_share"], context.c_str(), "respondent_share");
  }
  if (!cell.response_rate && !cell.respondent_share) {
    fail(context + ": needs response_rate or respondent_share");
  }
  // A cell with no knowledge is the level bound [0,1]; storing it that way
  // keeps the stratified regime kinds homogeneous.
  AssumptionRegime regime = parse_regime(require_field(obj, context.c_str(), "regime"), context.c_str());
  if (std::holds_alternative<NoKnowledge>(regime)) {
    cell.regime = LevelBound{0.0, 1.0};
  } else {
    cell.regime = regime;
  }
  return cell;
}

}  // namespace

StratifiedPoll PollSpec::stratified_poll() const {
  StratifiedPoll poll;
  poll.strata = strata;
  const double overall_rate = resolve_response_rate(design);
  for (auto& cell : poll.strata) {
    if (!cell.response_rate) {
      cell.response_rate =
          bayes_stratum_rate(*cell.respondent_share, overall_rate, cell.population_share);
    }
  }
  poll.validate();
  return poll;
}

PollSpec parse_poll_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    fail(std::string("poll spec is not valid JSON: ") + err.what());
  }
  if (!doc.is_object()) fail("poll spec: top level must be an object");
  reject_unknown_fields(doc, "poll spec", {"design", "tally", "regime", "strata"});

  PollSpec spec;
  spec.design = parse_design(require_field(doc, "poll spec", "design"));
  spec.design.validate();
  spec.tally = parse_tally(require_field(doc, "poll spec", "tally"), spec.design.respondents,
                           &spec.warnings, "tally");
  spec.tally.validate();
  if (spec.tally.total() != spec.design.respondents) {
    fail("tally: counts sum to " + std::to_string(spec.tally.total()) + " but design.respondents is " +
         std::to_string(spec.design.respondents));
  }
  spec.regime = parse_regime(require_field(doc, "poll spec", "regime"), "regime");
  validate_regime(spec.regime);

  if (doc.contains("strata")) {
    const json& strata = doc["strata"];
    if (!strata.is_array() || strata.empty()) fail("strata: must be a non-empty array");
    for (std::size_t i = 0; i < strata.size(); ++i) {
      spec.strata.push_back(parse_stratum(strata[i], i, &spec.warnings));
    }
  }
  return spec;
}

PollSpec load_poll_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open poll spec file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_poll_spec(buffer.str());
}

}  // namespace pollbounds
