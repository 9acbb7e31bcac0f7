#include "simhra/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simhra/errors.hpp"
#include "simhra/fs_util.hpp"

namespace simhra {

using nlohmann::json;

std::string to_string(Role role) {
  switch (role) {
    case Role::Authority: return "Authority";
    case Role::Coordinator: return "Coordinator";
    case Role::Operator: return "Operator";
  }
  return "?";
}

std::string to_string(AuthorityLevel level) {
  switch (level) {
    case AuthorityLevel::High: return "High";
    case AuthorityLevel::Medium: return "Medium";
    case AuthorityLevel::Low: return "Low";
  }
  return "?";
}

std::string to_string(CueClass cue) {
  switch (cue) {
    case CueClass::Neutral: return "neutral";
    case CueClass::Disconfirming: return "disconfirming";
    case CueClass::Escalating: return "escalating";
  }
  return "?";
}

Role role_from_string(const std::string& s) {
  if (s == "Authority") return Role::Authority;
  if (s == "Coordinator") return Role::Coordinator;
  if (s == "Operator") return Role::Operator;
  throw ParseError("unknown role_name: " + s);
}

AuthorityLevel authority_level_from_string(const std::string& s) {
  if (s == "High") return AuthorityLevel::High;
  if (s == "Medium") return AuthorityLevel::Medium;
  if (s == "Low") return AuthorityLevel::Low;
  throw ParseError("unknown authority_level: " + s);
}

CueClass cue_class_from_string(const std::string& s) {
  if (s == "neutral") return CueClass::Neutral;
  if (s == "disconfirming") return CueClass::Disconfirming;
  if (s == "escalating") return CueClass::Escalating;
  throw ParseError("unknown cue_class: " + s);
}

std::string authority_position_phrase(AuthorityLevel level) {
  switch (level) {
    case AuthorityLevel::High:
      return "High authority: you direct the crew, set the accepted interpretation of plant "
             "state, and expect compliance.";
    case AuthorityLevel::Medium:
      return "Medium authority: you relay instructions downward and information upward, and "
             "you defer to the shift's senior decision-maker.";
    case AuthorityLevel::Low:
      return "Low authority: you operate the boards, answer to the levels above you, and "
             "raising a challenge against them carries real social cost.";
  }
  return "";
}

std::string assemble_role_prompt(const RoleSpec& spec) {
  std::ostringstream out;
  out << "You are " << spec.historical_person << ", acting as the " << to_string(spec.role_name)
      << " agent of a nuclear control-room crew in a historical accident simulation.\n"
      << "Knowledge boundary: " << spec.knowledge_boundary << "\n"
      << "Operational responsibility: " << spec.operational_responsibility << "\n"
      << "Authority position: " << authority_position_phrase(spec.authority_level) << "\n"
      << "Behavioral tendencies under stress: " << spec.behavioral_tendencies << "\n"
      << "Always speak in character, one conversational turn at a time, grounded in what has "
         "been said in the room so far.";
  return out.str();
}

const RoleSpec& Scenario::role(Role r) const {
  for (const auto& spec : roster) {
    if (spec.role_name == r) return spec;
  }
  throw ConfigError("scenario " + scenario_id + " has no roster entry for " + to_string(r));
}

std::optional<int> Scenario::first_disconfirming_round() const {
  std::optional<int> first;
  for (const auto& event : timeline) {
    if (event.cue_class == CueClass::Disconfirming && (!first || event.round < *first)) {
      first = event.round;
    }
  }
  return first;
}

namespace {

const json& require_field(const json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ParseError(where + ": missing field " + key);
  }
  return *it;
}

std::string require_string(const json& doc, const char* key, const std::string& where) {
  const json& v = require_field(doc, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key + ": expected string");
  return v.get<std::string>();
}

double require_number(const json& doc, const char* key, const std::string& where) {
  const json& v = require_field(doc, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected number");
  return v.get<double>();
}

int require_int(const json& doc, const char* key, const std::string& where) {
  const json& v = require_field(doc, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected integer");
  return v.get<int>();
}

RoleSpec parse_role_spec(const json& doc, const std::string& where) {
  RoleSpec spec;
  spec.role_name = role_from_string(require_string(doc, "role_name", where));
  spec.historical_person = require_string(doc, "historical_person", where);
  spec.authority_level = authority_level_from_string(require_string(doc, "authority_level", where));
  spec.knowledge_boundary = require_string(doc, "knowledge_boundary", where);
  spec.operational_responsibility = require_string(doc, "operational_responsibility", where);
  spec.behavioral_tendencies = require_string(doc, "behavioral_tendencies", where);
  if (doc.contains("role_prompt") && doc["role_prompt"].is_string() &&
      !doc["role_prompt"].get<std::string>().empty()) {
    spec.role_prompt = doc["role_prompt"].get<std::string>();
  } else {
    spec.role_prompt = assemble_role_prompt(spec);
  }
  return spec;
}

DdtOutcome parse_ddt_outcome(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() == "NO_RECOVERY") return DdtOutcome::none();
    throw ParseError(where + ": expected minutes or \"NO_RECOVERY\"");
  }
  if (v.is_number()) return DdtOutcome::recovered(v.get<double>());
  throw ParseError(where + ": expected minutes or \"NO_RECOVERY\"");
}

Interval parse_interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(where + ": expected [lo, hi]");
  }
  return Interval{v[0].get<double>(), v[1].get<double>()};
}

json interval_to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

}  // namespace

Scenario parse_scenario_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario: expected a JSON object");
  Scenario s;
  s.scenario_id = require_string(doc, "scenario_id", "scenario");

  const json& roster = require_field(doc, "roster", "scenario");
  if (!roster.is_array()) throw ParseError("scenario.roster: expected array");
  int index = 0;
  for (const auto& entry : roster) {
    s.roster.push_back(parse_role_spec(entry, "roster[" + std::to_string(index) + "]"));
    ++index;
  }

  const json& temporal = require_field(doc, "temporal", "scenario");
  s.temporal.total_rounds = require_int(temporal, "total_rounds", "temporal");
  s.temporal.minutes_per_round = require_number(temporal, "minutes_per_round", "temporal");
  s.temporal.onset_round =
      temporal.contains("onset_round") ? require_int(temporal, "onset_round", "temporal") : 1;
  s.temporal.declared_total_minutes = require_number(temporal, "declared_total_minutes", "temporal");

  const json& timeline = require_field(doc, "timeline", "scenario");
  if (!timeline.is_array()) throw ParseError("scenario.timeline: expected array");
  index = 0;
  for (const auto& entry : timeline) {
    const std::string where = "timeline[" + std::to_string(index) + "]";
    TimelineEvent event;
    event.round = require_int(entry, "round", where);
    event.description = require_string(entry, "description", where);
    event.cue_class = cue_class_from_string(require_string(entry, "cue_class", where));
    s.timeline.push_back(std::move(event));
    ++index;
  }

  const json& criteria = require_field(doc, "criteria", "scenario");
  if (criteria.contains("csr_min")) {
    s.criteria.csr_min = require_number(criteria, "csr_min", "criteria");
  }
  if (criteria.contains("ddt_rule")) {
    const json& rule = criteria["ddt_rule"];
    if (rule.is_string() && rule.get<std::string>() == "REQUIRE_NO_RECOVERY") {
      s.criteria.ddt_rule = DdtRule::require_none();
    } else {
      s.criteria.ddt_rule = DdtRule{false, parse_interval(rule, "criteria.ddt_rule")};
    }
  }
  if (criteria.contains("ipr_rule")) {
    s.criteria.ipr_rule = parse_interval(criteria["ipr_rule"], "criteria.ipr_rule");
  }
  if (criteria.contains("fli_min")) {
    s.criteria.fli_min = require_int(criteria, "fli_min", "criteria");
  }
  if (criteria.contains("apc_cascade_required")) {
    if (!criteria["apc_cascade_required"].is_boolean()) {
      throw ParseError("criteria.apc_cascade_required: expected boolean");
    }
    s.criteria.apc_cascade_required = criteria["apc_cascade_required"].get<bool>();
  }

  const json& baseline = require_field(doc, "baseline", "scenario");
  if (baseline.contains("ddt")) {
    s.baseline.ddt = parse_ddt_outcome(baseline["ddt"], "baseline.ddt");
  }
  if (baseline.contains("ipr")) s.baseline.ipr = require_number(baseline, "ipr", "baseline");
  if (baseline.contains("csr")) s.baseline.csr = require_number(baseline, "csr", "baseline");
  if (baseline.contains("fli")) s.baseline.fli = require_number(baseline, "fli", "baseline");
  if (baseline.contains("apc")) {
    const json& apc = baseline["apc"];
    ApcBaseline b;
    b.presence = require_field(apc, "presence", "baseline.apc").get<bool>();
    b.depth = require_number(apc, "depth", "baseline.apc");
    s.baseline.apc = b;
  }

  const json& drift = require_field(doc, "drift", "scenario");
  s.drift.earliest_plausible_recovery_round =
      require_int(drift, "earliest_plausible_recovery_round", "drift");
  s.drift.locked_frame_description = require_string(drift, "locked_frame_description", "drift");
  s.drift.frame_release_round = require_int(drift, "frame_release_round", "drift");
  s.drift.strict_hierarchy = require_field(drift, "strict_hierarchy", "drift").get<bool>();
  if (drift.contains("abandonment_keywords")) {
    for (const auto& kw : drift["abandonment_keywords"]) {
      s.drift.abandonment_keywords.push_back(kw.get<std::string>());
    }
  }

  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return parse_scenario_json(doc);
}

json scenario_to_json(const Scenario& s) {
  json roster = json::array();
  for (const auto& spec : s.roster) {
    roster.push_back(json{{"role_name", to_string(spec.role_name)},
                          {"historical_person", spec.historical_person},
                          {"authority_level", to_string(spec.authority_level)},
                          {"knowledge_boundary", spec.knowledge_boundary},
                          {"operational_responsibility", spec.operational_responsibility},
                          {"behavioral_tendencies", spec.behavioral_tendencies},
                          {"role_prompt", spec.role_prompt}});
  }

  json timeline = json::array();
  for (const auto& event : s.timeline) {
    timeline.push_back(json{{"round", event.round},
                            {"description", event.description},
                            {"cue_class", to_string(event.cue_class)}});
  }

  json criteria = json::object();
  if (s.criteria.csr_min) criteria["csr_min"] = *s.criteria.csr_min;
  if (s.criteria.ddt_rule) {
    if (s.criteria.ddt_rule->require_no_recovery) {
      criteria["ddt_rule"] = "REQUIRE_NO_RECOVERY";
    } else {
      criteria["ddt_rule"] = interval_to_json(s.criteria.ddt_rule->window);
    }
  }
  if (s.criteria.ipr_rule) criteria["ipr_rule"] = interval_to_json(*s.criteria.ipr_rule);
  if (s.criteria.fli_min) criteria["fli_min"] = *s.criteria.fli_min;
  if (s.criteria.apc_cascade_required) {
    criteria["apc_cascade_required"] = *s.criteria.apc_cascade_required;
  }

  json baseline = json::object();
  if (s.baseline.ddt) {
    baseline["ddt"] = s.baseline.ddt->no_recovery ? json("NO_RECOVERY") : json(s.baseline.ddt->minutes);
  }
  if (s.baseline.ipr) baseline["ipr"] = *s.baseline.ipr;
  if (s.baseline.csr) baseline["csr"] = *s.baseline.csr;
  if (s.baseline.fli) baseline["fli"] = *s.baseline.fli;
  if (s.baseline.apc) {
    baseline["apc"] = json{{"presence", s.baseline.apc->presence}, {"depth", s.baseline.apc->depth}};
  }

  return json{{"scenario_id", s.scenario_id},
              {"roster", roster},
              {"temporal",
               {{"total_rounds", s.temporal.total_rounds},
                {"minutes_per_round", s.temporal.minutes_per_round},
                {"onset_round", s.temporal.onset_round},
                {"declared_total_minutes", s.temporal.declared_total_minutes}}},
              {"timeline", timeline},
              {"criteria", criteria},
              {"baseline", baseline},
              {"drift",
               {{"earliest_plausible_recovery_round", s.drift.earliest_plausible_recovery_round},
                {"locked_frame_description", s.drift.locked_frame_description},
                {"frame_release_round", s.drift.frame_release_round},
                {"strict_hierarchy", s.drift.strict_hierarchy},
                {"abandonment_keywords", s.drift.abandonment_keywords}}}};
}

Scenario load_scenario(const std::string& source) {
  if (is_builtin_scenario(source)) {
    return parse_scenario_text(builtin_scenario_text(source));
  }
  const std::filesystem::path path(source);
  if (!std::filesystem::exists(path)) {
    throw NotFoundError("unknown scenario: " + source +
                        " (not a builtin id and no such file)");
  }
  return parse_scenario_text(read_text_file(path));
}

namespace {

int ordinal(AuthorityLevel level) { return static_cast<int>(level); }

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> violations;
  auto flag = [&violations](const std::string& message) { violations.push_back(message); };

  if (s.scenario_id.empty()) flag("scenario_id: must be non-empty");

  // Roster: exactly one spec per role, authority strictly decreasing A > C > O.
  for (Role role : kAllRoles) {
    const auto count = std::count_if(s.roster.begin(), s.roster.end(),
                                     [role](const RoleSpec& r) { return r.role_name == role; });
    if (count != 1) {
      flag("roster: expected exactly one " + to_string(role) + " entry, found " +
           std::to_string(count));
    }
  }
  if (s.roster.size() != 3) {
    flag("roster: expected 3 entries, found " + std::to_string(s.roster.size()));
  }

  const RoleSpec* authority = nullptr;
  const RoleSpec* coordinator = nullptr;
  const RoleSpec* operator_spec = nullptr;
  for (const auto& spec : s.roster) {
    if (spec.role_name == Role::Authority && !authority) authority = &spec;
    if (spec.role_name == Role::Coordinator && !coordinator) coordinator = &spec;
    if (spec.role_name == Role::Operator && !operator_spec) operator_spec = &spec;
  }
  if (authority && coordinator && operator_spec) {
    if (!(ordinal(authority->authority_level) > ordinal(coordinator->authority_level) &&
          ordinal(coordinator->authority_level) > ordinal(operator_spec->authority_level))) {
      flag("roster: authority_level must strictly decrease Authority > Coordinator > Operator");
    }
  }
  for (const auto& spec : s.roster) {
    const std::string where = "roster[" + to_string(spec.role_name) + "]";
    if (spec.role_prompt.empty()) {
      flag(where + ".role_prompt: must be non-empty");
      continue;
    }
    auto contains = [&spec](const std::string& needle) {
      return !needle.empty() && spec.role_prompt.find(needle) != std::string::npos;
    };
    if (!contains(spec.knowledge_boundary)) {
      flag(where + ".role_prompt: missing knowledge_boundary text");
    }
    if (!contains(spec.operational_responsibility)) {
      flag(where + ".role_prompt: missing operational_responsibility text");
    }
    if (!contains(spec.behavioral_tendencies)) {
      flag(where + ".role_prompt: missing behavioral_tendencies text");
    }
    if (!contains(authority_position_phrase(spec.authority_level))) {
      flag(where + ".role_prompt: missing authority position text");
    }
  }

  if (s.temporal.total_rounds < 1) flag("temporal.total_rounds: must be positive");
  if (s.temporal.minutes_per_round <= 0.0) flag("temporal.minutes_per_round: must be positive");
  if (s.temporal.onset_round < 1) flag("temporal.onset_round: must be positive");
  if (s.temporal.total_rounds >= 1 && s.temporal.minutes_per_round > 0.0) {
    const double duration = s.total_duration_minutes();
    if (std::abs(duration - s.temporal.declared_total_minutes) > s.temporal.minutes_per_round) {
      flag("temporal: total_rounds * minutes_per_round = " + std::to_string(duration) +
           " differs from declared_total_minutes by more than one round");
    }
  }

  bool covers_round_one = false;
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    const auto& event = s.timeline[i];
    if (event.round < 1 || event.round > s.temporal.total_rounds) {
      flag("timeline[" + std::to_string(i) + "].round: " + std::to_string(event.round) +
           " outside [1, " + std::to_string(s.temporal.total_rounds) + "]");
    }
    if (event.round == 1) covers_round_one = true;
  }
  if (!covers_round_one) flag("timeline: must cover round 1");

  if (!s.criteria.csr_min) flag("criteria.csr_min: required");
  if (!s.criteria.ddt_rule) flag("criteria.ddt_rule: required");
  if (s.criteria.ddt_rule && !s.criteria.ddt_rule->require_no_recovery &&
      s.criteria.ddt_rule->window.lo > s.criteria.ddt_rule->window.hi) {
    flag("criteria.ddt_rule: lo <= hi violated");
  }
  if (s.criteria.ipr_rule && s.criteria.ipr_rule->lo > s.criteria.ipr_rule->hi) {
    flag("criteria.ipr_rule: lo <= hi violated");
  }

  // Every metric referenced by a criterion needs a baseline entry.
  if (s.criteria.csr_min && !s.baseline.csr) flag("baseline.csr: required by criteria");
  if (s.criteria.ddt_rule && !s.baseline.ddt) flag("baseline.ddt: required by criteria");
  if (s.criteria.ipr_rule && !s.baseline.ipr) flag("baseline.ipr: required by criteria");
  if (s.criteria.fli_min && !s.baseline.fli) flag("baseline.fli: required by criteria");
  if (s.criteria.apc_cascade_required && !s.baseline.apc) flag("baseline.apc: required by criteria");

  if (s.drift.earliest_plausible_recovery_round < 1) {
    flag("drift.earliest_plausible_recovery_round: must be positive");
  }
  if (!(s.drift.earliest_plausible_recovery_round <= s.drift.frame_release_round &&
        s.drift.frame_release_round <= s.temporal.total_rounds)) {
    flag("drift: earliest_plausible_recovery_round <= frame_release_round <= total_rounds violated");
  }

  return violations;
}

}  // namespace simhra
