#include "simhra/dialogue.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "simhra/errors.hpp"
#include "simhra/fs_util.hpp"

namespace simhra {

using nlohmann::json;

std::string Speaker::name() const { return is_world_ ? "WORLD" : to_string(role_); }

Speaker speaker_from_string(const std::string& s) {
  if (s == "WORLD") return Speaker::world();
  return Speaker::agent(role_from_string(s));
}

std::string to_string(ProcedureDecision d) {
  switch (d) {
    case ProcedureDecision::None: return "none";
    case ProcedureDecision::Correct: return "correct";
    case ProcedureDecision::Incorrect: return "incorrect";
  }
  return "?";
}

std::string to_string(CriticalConcern c) {
  switch (c) {
    case CriticalConcern::VoicedEngaged: return "voiced_engaged";
    case CriticalConcern::VoicedDismissed: return "voiced_dismissed";
    case CriticalConcern::UnvoicedWarranted: return "unvoiced_warranted";
  }
  return "?";
}

ProcedureDecision procedure_decision_from_string(const std::string& s) {
  if (s == "none") return ProcedureDecision::None;
  if (s == "correct") return ProcedureDecision::Correct;
  if (s == "incorrect") return ProcedureDecision::Incorrect;
  throw ParseError("unknown procedure_decision: " + s);
}

CriticalConcern critical_concern_from_string(const std::string& s) {
  if (s == "voiced_engaged") return CriticalConcern::VoicedEngaged;
  if (s == "voiced_dismissed") return CriticalConcern::VoicedDismissed;
  if (s == "unvoiced_warranted") return CriticalConcern::UnvoicedWarranted;
  throw ParseError("unknown critical_concern: " + s);
}

bool AnnotationSet::empty() const {
  return !recovery_identification && procedure_decision == ProcedureDecision::None &&
         !critical_concern && !directive_pressure_to && !frame_reinforcement &&
         !assertive_challenge_to;
}

namespace {

int role_rank(Role r) {
  switch (r) {
    case Role::Authority: return 2;
    case Role::Coordinator: return 1;
    case Role::Operator: return 0;
  }
  return -1;
}

void check_annotation_invariants(const Utterance& u) {
  if (!u.annotations) return;
  if (u.speaker.is_world()) {
    if (!u.annotations->empty()) {
      throw std::invalid_argument("WORLD entries carry no annotations");
    }
    return;
  }
  const Role speaker = u.speaker.role();
  if (u.annotations->directive_pressure_to &&
      role_rank(*u.annotations->directive_pressure_to) >= role_rank(speaker)) {
    throw std::invalid_argument("directive_pressure_to must name a strictly lower authority than " +
                                to_string(speaker));
  }
  if (u.annotations->assertive_challenge_to &&
      role_rank(*u.annotations->assertive_challenge_to) <= role_rank(speaker)) {
    throw std::invalid_argument("assertive_challenge_to must name a strictly higher authority than " +
                                to_string(speaker));
  }
}

}  // namespace

void DialogueBuffer::append(Utterance u) {
  if (u.round < 1) {
    throw OrderingError("round must be positive, got " + std::to_string(u.round));
  }
  if (u.speaker.is_world() ? u.turn_index != 0 : u.turn_index < 1) {
    throw OrderingError("turn_index must be 0 for WORLD entries and >= 1 for agent turns");
  }
  if (u.round < current_round_) {
    throw OrderingError("utterance for round " + std::to_string(u.round) +
                        " is behind current round " + std::to_string(current_round_));
  }
  if (!entries_.empty()) {
    const Utterance& last = entries_.back();
    const bool increases =
        u.round > last.round || (u.round == last.round && u.turn_index > last.turn_index);
    if (!increases) {
      throw OrderingError("(round, turn_index) must strictly increase: got (" +
                          std::to_string(u.round) + ", " + std::to_string(u.turn_index) +
                          ") after (" + std::to_string(last.round) + ", " +
                          std::to_string(last.turn_index) + ")");
    }
  }
  check_annotation_invariants(u);
  current_round_ = u.round;
  entries_.push_back(std::move(u));
}

std::string render_context(const DialogueBuffer& buffer) {
  std::ostringstream out;
  for (const auto& u : buffer.entries()) {
    out << 'R' << u.round << '.' << u.turn_index << " [" << u.speaker.name() << "]: " << u.text
        << '\n';
  }
  return out.str();
}

namespace {

json annotations_to_json(const AnnotationSet& a) {
  json doc = json::object();
  if (a.recovery_identification) doc["recovery_identification"] = true;
  if (a.procedure_decision != ProcedureDecision::None) {
    doc["procedure_decision"] = to_string(a.procedure_decision);
  }
  if (a.critical_concern) doc["critical_concern"] = to_string(*a.critical_concern);
  if (a.directive_pressure_to) doc["directive_pressure_to"] = to_string(*a.directive_pressure_to);
  if (a.frame_reinforcement) doc["frame_reinforcement"] = *a.frame_reinforcement;
  if (a.assertive_challenge_to) {
    doc["assertive_challenge_to"] = to_string(*a.assertive_challenge_to);
  }
  return doc;
}

AnnotationSet annotations_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError(where + ".annotations: expected object");
  AnnotationSet a;
  if (doc.contains("recovery_identification")) {
    a.recovery_identification = doc["recovery_identification"].get<bool>();
  }
  if (doc.contains("procedure_decision")) {
    a.procedure_decision = procedure_decision_from_string(doc["procedure_decision"].get<std::string>());
  }
  if (doc.contains("critical_concern")) {
    a.critical_concern = critical_concern_from_string(doc["critical_concern"].get<std::string>());
  }
  if (doc.contains("directive_pressure_to")) {
    a.directive_pressure_to = role_from_string(doc["directive_pressure_to"].get<std::string>());
  }
  if (doc.contains("frame_reinforcement")) {
    a.frame_reinforcement = doc["frame_reinforcement"].get<bool>();
  }
  if (doc.contains("assertive_challenge_to")) {
    a.assertive_challenge_to = role_from_string(doc["assertive_challenge_to"].get<std::string>());
  }
  return a;
}

}  // namespace

json utterance_to_json(const Utterance& u) {
  json doc{{"run_id", u.run_id},
           {"round", u.round},
           {"turn_index", u.turn_index},
           {"speaker", u.speaker.name()},
           {"text", u.text}};
  if (u.annotations && !u.annotations->empty()) {
    doc["annotations"] = annotations_to_json(*u.annotations);
  }
  return doc;
}

Utterance utterance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("utterance: expected object");
  Utterance u;
  for (const char* key : {"run_id", "round", "turn_index", "speaker", "text"}) {
    if (!doc.contains(key)) throw ParseError(std::string("utterance: missing field ") + key);
  }
  u.run_id = doc["run_id"].get<std::string>();
  u.round = doc["round"].get<int>();
  u.turn_index = doc["turn_index"].get<int>();
  u.speaker = speaker_from_string(doc["speaker"].get<std::string>());
  u.text = doc["text"].get<std::string>();
  if (doc.contains("annotations")) {
    const AnnotationSet a = annotations_from_json(doc["annotations"], "utterance");
    if (!a.empty()) u.annotations = a;
  }
  return u;
}

void save_transcript(const DialogueBuffer& buffer, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& u : buffer.entries()) {
    out << utterance_to_json(u).dump() << '\n';
  }
  write_text_file_atomic(path, out.str());
}

DialogueBuffer load_transcript(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  DialogueBuffer buffer;
  std::istringstream in(text);
  std::string line;
  int record = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("transcript record " + std::to_string(record) + ": " + e.what());
    }
    try {
      buffer.append(utterance_from_json(doc));
    } catch (const std::exception& e) {
      throw ParseError("transcript record " + std::to_string(record) + ": " + e.what());
    }
    ++record;
  }
  return buffer;
}

}  // namespace simhra
