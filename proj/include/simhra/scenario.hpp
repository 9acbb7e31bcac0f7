#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace simhra {

enum class Role { Authority, Coordinator, Operator };
enum class AuthorityLevel { Low = 0, Medium = 1, High = 2 };
enum class CueClass { Neutral, Disconfirming, Escalating };

constexpr Role kAllRoles[] = {Role::Authority, Role::Coordinator, Role::Operator};

std::string to_string(Role role);
std::string to_string(AuthorityLevel level);
std::string to_string(CueClass cue);
Role role_from_string(const std::string& s);
AuthorityLevel authority_level_from_string(const std::string& s);
CueClass cue_class_from_string(const std::string& s);

/// One crew member: who they model and the four dimensions that condition
/// their behavior (knowledge boundary, operational responsibility, authority
/// position, stress tendencies). `role_prompt` is assembled from the four
/// dimensions when a scenario file does not supply one explicitly.
struct RoleSpec {
  Role role_name = Role::Authority;
  std::string historical_person;
  AuthorityLevel authority_level = AuthorityLevel::High;
  std::string knowledge_boundary;
  std::string operational_responsibility;
  std::string behavioral_tendencies;
  std::string role_prompt;

  bool operator==(const RoleSpec&) const = default;
};

/// Canonical phrase for an authority position; role prompts must contain it.
std::string authority_position_phrase(AuthorityLevel level);
std::string assemble_role_prompt(const RoleSpec& spec);

struct TemporalConfig {
  int total_rounds = 0;
  double minutes_per_round = 0.0;  // tau
  int onset_round = 1;             // round at which the abnormal event begins
  double declared_total_minutes = 0.0;

  bool operator==(const TemporalConfig&) const = default;
};

struct TimelineEvent {
  int round = 0;
  std::string description;
  CueClass cue_class = CueClass::Neutral;

  bool operator==(const TimelineEvent&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Decision delay outcome: elapsed minutes, or the NO_RECOVERY sentinel when
/// the team never identifies a correct recovery within the horizon.
struct DdtOutcome {
  bool no_recovery = false;
  double minutes = 0.0;

  static DdtOutcome recovered(double m) { return {false, m}; }
  static DdtOutcome none() { return {true, 0.0}; }
  bool operator==(const DdtOutcome&) const = default;
};

/// DDT acceptance rule: a minutes window, or REQUIRE_NO_RECOVERY.
struct DdtRule {
  bool require_no_recovery = false;
  Interval window{};

  static DdtRule require_none() { return {true, {}}; }
  static DdtRule in_window(double lo, double hi) { return {false, {lo, hi}}; }
  bool operator==(const DdtRule&) const = default;
};

/// Face-validity acceptance criteria. One-sided bounds are stored as closed
/// intervals with the missing end at 0 or 100. A run PASSes only when every
/// present criterion holds at once.
struct AcceptanceCriteria {
  std::optional<double> csr_min;
  std::optional<DdtRule> ddt_rule;
  std::optional<Interval> ipr_rule;
  std::optional<int> fli_min;
  std::optional<bool> apc_cascade_required;

  bool operator==(const AcceptanceCriteria&) const = default;
};

struct ApcBaseline {
  bool presence = false;
  double depth = 0.0;

  bool operator==(const ApcBaseline&) const = default;
};

/// Historical reference values the simulation is compared against.
struct HistoricalBaseline {
  std::optional<DdtOutcome> ddt;
  std::optional<double> ipr;
  std::optional<double> csr;
  std::optional<double> fli;
  std::optional<ApcBaseline> apc;

  bool operator==(const HistoricalBaseline&) const = default;
};

/// Parameters for rule-based drift detection.
struct DriftParams {
  int earliest_plausible_recovery_round = 1;
  std::string locked_frame_description;
  int frame_release_round = 1;
  bool strict_hierarchy = false;
  // Phrases that signal explicit frame abandonment in unannotated text.
  std::vector<std::string> abandonment_keywords;

  bool operator==(const DriftParams&) const = default;
};

struct Scenario {
  std::string scenario_id;
  std::vector<RoleSpec> roster;  // exactly one spec per role
  TemporalConfig temporal;
  std::vector<TimelineEvent> timeline;
  AcceptanceCriteria criteria;
  HistoricalBaseline baseline;
  DriftParams drift;

  const RoleSpec& role(Role r) const;
  double total_duration_minutes() const {
    return temporal.total_rounds * temporal.minutes_per_round;
  }
  /// Round of the first disconfirming timeline cue, if any.
  std::optional<int> first_disconfirming_round() const;

  bool operator==(const Scenario&) const = default;
};

/// Loads a scenario from a builtin identifier or a file path.
/// Builtins and files share one format and one parser.
Scenario load_scenario(const std::string& source);
Scenario parse_scenario_json(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
nlohmann::json scenario_to_json(const Scenario& s);

/// Returns every invariant violation; an empty report means the scenario is valid.
std::vector<std::string> validate_scenario(const Scenario& s);

std::vector<std::string> builtin_scenario_ids();
bool is_builtin_scenario(const std::string& id);
const std::string& builtin_scenario_text(const std::string& id);

}  // namespace simhra
