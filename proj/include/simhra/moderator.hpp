#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simhra/dialogue.hpp"
#include "simhra/scenario.hpp"

namespace simhra {

enum class DriftType { PrematureEscalation, RationalOverride, AuthorityInversion };
enum class DriftCriterion { RoleConsistency, HistoricalPlausibility, StageAppropriateness };

std::string to_string(DriftType t);
std::string to_string(DriftCriterion c);
DriftType drift_type_from_string(const std::string& s);

struct DriftFinding {
  std::string run_id;
  int round = 0;
  Role agent = Role::Authority;
  DriftType drift_type = DriftType::PrematureEscalation;
  int evidence_turn_index = 0;  // turn of the triggering utterance within `round`
  DriftCriterion criterion = DriftCriterion::StageAppropriateness;

  bool operator==(const DriftFinding&) const = default;
};

/// Hidden corrective guidance. Applies for exactly one round and is never
/// serialized into the public transcript; persistence is a sidecar log.
struct ModeratorNote {
  Role target_agent = Role::Authority;
  int round_issued = 0;
  int round_applies = 0;  // always round_issued + 1
  DriftType drift_type = DriftType::PrematureEscalation;
  std::string text;

  bool operator==(const ModeratorNote&) const = default;
};

/// Corrective-note wording per drift type. "{round}" and "{frame}" expand to
/// the issuing round and the scenario's locked frame description.
struct NoteTemplates {
  std::string premature_escalation =
      "Supervisory guidance (private): you are moving toward recovery actions earlier than "
      "this stage of the event supports. In your next turn, stay within the team's current "
      "understanding of the plant and do not initiate or endorse recovery measures.";
  std::string rational_override =
      "Supervisory guidance (private): in round {round} you drifted away from the reading "
      "your team has committed to ({frame}). Remain anchored to that interpretation in your "
      "next turn; the evidence available to you does not yet overturn it.";
  std::string authority_inversion =
      "Supervisory guidance (private): your challenge to senior authority went beyond what "
      "your role and this team's hierarchy support. In your next turn, defer to the "
      "established chain of command.";

  const std::string& for_type(DriftType t) const;
};

/// End-of-round rule evaluation over the round's agent utterances:
///  - PrematureEscalation: recovery identified before the earliest plausible round
///  - RationalOverride:    locked frame abandoned before the frame release round
///  - AuthorityInversion:  assertive challenge up-hierarchy under strict hierarchy
std::vector<DriftFinding> evaluate_round(const Scenario& scenario,
                                         const DialogueBuffer& buffer, int round);

/// One note per finding, applying the following round. Findings in the final
/// round produce no note.
std::vector<ModeratorNote> issue_notes(const std::vector<DriftFinding>& findings,
                                       const Scenario& scenario,
                                       const NoteTemplates& templates = {});

struct DriftTypeStats {
  int intervention_count = 0;
  long denominator = 0;  // total agent turns across the batch
  double rate = 0.0;     // count / denominator
  std::optional<std::pair<int, int>> primary_round_range;  // [min, max] issuing round
};

struct InterventionStats {
  long total_agent_turns = 0;
  std::map<DriftType, DriftTypeStats> by_type;
};

/// Aggregates note logs from a batch of runs. Throws std::invalid_argument
/// on a zero denominator.
InterventionStats intervention_stats(const std::vector<std::vector<ModeratorNote>>& note_logs,
                                     long total_agent_turns);

void save_note_log(const std::vector<ModeratorNote>& notes, const std::filesystem::path& path);
std::vector<ModeratorNote> load_note_log(const std::filesystem::path& path);

}  // namespace simhra
