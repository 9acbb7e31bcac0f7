#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "simhra/scenario.hpp"

namespace simhra {

/// Either one of the three crew roles, or the world-event injector.
/// Moderator output is never a speaker: hidden guidance does not enter
/// the public record.
struct Speaker {
  static Speaker world() { return Speaker{true, Role::Authority}; }
  static Speaker agent(Role r) { return Speaker{false, r}; }

  bool is_world() const { return is_world_; }
  Role role() const { return role_; }
  std::string name() const;

  bool operator==(const Speaker&) const = default;

  bool is_world_ = false;
  Role role_ = Role::Authority;
};

Speaker speaker_from_string(const std::string& s);

enum class ProcedureDecision { None, Correct, Incorrect };
enum class CriticalConcern { VoicedEngaged, VoicedDismissed, UnvoicedWarranted };

std::string to_string(ProcedureDecision d);
std::string to_string(CriticalConcern c);
ProcedureDecision procedure_decision_from_string(const std::string& s);
CriticalConcern critical_concern_from_string(const std::string& s);

/// Behavioral annotations consumed by the rule-based extractor and the
/// rule-based drift detectors. `frame_reinforcement` is tri-state: absent
/// means the utterance does not engage the locked frame, true means it
/// reinforces it, false means it engages the frame and abandons it.
struct AnnotationSet {
  bool recovery_identification = false;
  ProcedureDecision procedure_decision = ProcedureDecision::None;
  std::optional<CriticalConcern> critical_concern;
  std::optional<Role> directive_pressure_to;   // strictly lower authority
  std::optional<bool> frame_reinforcement;
  std::optional<Role> assertive_challenge_to;  // strictly higher authority

  bool empty() const;
  bool operator==(const AnnotationSet&) const = default;
};

struct Utterance {
  std::string run_id;
  int round = 0;
  int turn_index = 0;  // 0 for WORLD entries, 1..3 for agent turns
  Speaker speaker;
  std::string text;
  std::optional<AnnotationSet> annotations;

  bool operator==(const Utterance&) const = default;
};

/// The shared public dialogue record of one run. Append-only: entries are
/// never edited or removed, and (round, turn_index) strictly increases.
class DialogueBuffer {
 public:
  /// Throws OrderingError on out-of-order entries and std::invalid_argument
  /// on annotation invariant breaches (WORLD entries carrying annotations,
  /// pressure/challenge edges pointing the wrong way).
  void append(Utterance u);

  const std::vector<Utterance>& entries() const { return entries_; }
  int current_round() const { return current_round_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const DialogueBuffer&) const = default;

 private:
  std::vector<Utterance> entries_;
  int current_round_ = 0;
};

/// Deterministic linearization, one line per entry:
///   R{round}.{turn} [{speaker}]: {text}
std::string render_context(const DialogueBuffer& buffer);

nlohmann::json utterance_to_json(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& doc);

/// Line-delimited JSON persistence, one utterance per line. Lossless,
/// annotations included. Moderator notes live in a separate sidecar file.
void save_transcript(const DialogueBuffer& buffer, const std::filesystem::path& path);
DialogueBuffer load_transcript(const std::filesystem::path& path);

}  // namespace simhra
