#include "simhra/moderator.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simhra/errors.hpp"
#include "simhra/fs_util.hpp"

namespace simhra {

using nlohmann::json;

std::string to_string(DriftType t) {
  switch (t) {
    case DriftType::PrematureEscalation: return "PrematureEscalation";
    case DriftType::RationalOverride: return "RationalOverride";
    case DriftType::AuthorityInversion: return "AuthorityInversion";
  }
  return "?";
}

std::string to_string(DriftCriterion c) {
  switch (c) {
    case DriftCriterion::RoleConsistency: return "RoleConsistency";
    case DriftCriterion::HistoricalPlausibility: return "HistoricalPlausibility";
    case DriftCriterion::StageAppropriateness: return "StageAppropriateness";
  }
  return "?";
}

DriftType drift_type_from_string(const std::string& s) {
  if (s == "PrematureEscalation") return DriftType::PrematureEscalation;
  if (s == "RationalOverride") return DriftType::RationalOverride;
  if (s == "AuthorityInversion") return DriftType::AuthorityInversion;
  throw ParseError("unknown drift_type: " + s);
}

const std::string& NoteTemplates::for_type(DriftType t) const {
  switch (t) {
    case DriftType::PrematureEscalation: return premature_escalation;
    case DriftType::RationalOverride: return rational_override;
    case DriftType::AuthorityInversion: return authority_inversion;
  }
  return premature_escalation;
}

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains_keyword(const std::string& text, const std::vector<std::string>& keywords) {
  const std::string haystack = lowercase(text);
  for (const auto& kw : keywords) {
    if (!kw.empty() && haystack.find(lowercase(kw)) != std::string::npos) return true;
  }
  return false;
}

int role_rank(Role r) {
  switch (r) {
    case Role::Authority: return 2;
    case Role::Coordinator: return 1;
    case Role::Operator: return 0;
  }
  return -1;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  if (from.empty()) return;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::vector<DriftFinding> evaluate_round(const Scenario& scenario, const DialogueBuffer& buffer,
                                         int round) {
  std::vector<DriftFinding> findings;
  const DriftParams& drift = scenario.drift;

  for (const auto& u : buffer.entries()) {
    if (u.round != round || u.speaker.is_world()) continue;

    auto add = [&](DriftType type, DriftCriterion criterion) {
      findings.push_back(DriftFinding{u.run_id, round, u.speaker.role(), type, u.turn_index,
                                      criterion});
    };

    if (u.annotations && u.annotations->recovery_identification &&
        round < drift.earliest_plausible_recovery_round) {
      add(DriftType::PrematureEscalation, DriftCriterion::StageAppropriateness);
    }

    const bool annotated_abandonment =
        u.annotations && u.annotations->frame_reinforcement.has_value() &&
        !*u.annotations->frame_reinforcement;
    const bool keyword_abandonment = contains_keyword(u.text, drift.abandonment_keywords);
    if ((annotated_abandonment || keyword_abandonment) && round < drift.frame_release_round) {
      add(DriftType::RationalOverride, DriftCriterion::HistoricalPlausibility);
    }

    if (drift.strict_hierarchy && u.annotations && u.annotations->assertive_challenge_to &&
        role_rank(*u.annotations->assertive_challenge_to) > role_rank(u.speaker.role())) {
      add(DriftType::AuthorityInversion, DriftCriterion::RoleConsistency);
    }
  }
  return findings;
}

std::vector<ModeratorNote> issue_notes(const std::vector<DriftFinding>& findings,
                                       const Scenario& scenario, const NoteTemplates& templates) {
  std::vector<ModeratorNote> notes;
  for (const auto& finding : findings) {
    if (finding.round >= scenario.temporal.total_rounds) continue;  // nothing left to correct
    std::string text = templates.for_type(finding.drift_type);
    replace_all(text, "{round}", std::to_string(finding.round));
    replace_all(text, "{frame}", scenario.drift.locked_frame_description);
    notes.push_back(ModeratorNote{finding.agent, finding.round, finding.round + 1,
                                  finding.drift_type, std::move(text)});
  }
  return notes;
}

InterventionStats intervention_stats(const std::vector<std::vector<ModeratorNote>>& note_logs,
                                     long total_agent_turns) {
  if (total_agent_turns <= 0) {
    throw std::invalid_argument("intervention_stats: denominator must be positive");
  }
  InterventionStats stats;
  stats.total_agent_turns = total_agent_turns;
  for (DriftType type : {DriftType::PrematureEscalation, DriftType::RationalOverride,
                         DriftType::AuthorityInversion}) {
    stats.by_type[type] = DriftTypeStats{0, total_agent_turns, 0.0, std::nullopt};
  }
  for (const auto& log : note_logs) {
    for (const auto& note : log) {
      DriftTypeStats& entry = stats.by_type[note.drift_type];
      entry.intervention_count += 1;
      if (!entry.primary_round_range) {
        entry.primary_round_range = {note.round_issued, note.round_issued};
      } else {
        entry.primary_round_range->first = std::min(entry.primary_round_range->first, note.round_issued);
        entry.primary_round_range->second =
            std::max(entry.primary_round_range->second, note.round_issued);
      }
    }
  }
  for (auto& [type, entry] : stats.by_type) {
    entry.rate = static_cast<double>(entry.intervention_count) / static_cast<double>(total_agent_turns);
  }
  return stats;
}

void save_note_log(const std::vector<ModeratorNote>& notes, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& note : notes) {
    out << json{{"target_agent", to_string(note.target_agent)},
                {"round_issued", note.round_issued},
                {"round_applies", note.round_applies},
                {"drift_type", to_string(note.drift_type)},
                {"text", note.text}}
               .dump()
        << '\n';
  }
  write_text_file_atomic(path, out.str());
}

std::vector<ModeratorNote> load_note_log(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<ModeratorNote> notes;
  std::istringstream in(text);
  std::string line;
  int record = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
      ModeratorNote note;
      note.target_agent = role_from_string(doc.at("target_agent").get<std::string>());
      note.round_issued = doc.at("round_issued").get<int>();
      note.round_applies = doc.at("round_applies").get<int>();
      note.drift_type = drift_type_from_string(doc.at("drift_type").get<std::string>());
      note.text = doc.at("text").get<std::string>();
      notes.push_back(std::move(note));
    } catch (const std::exception& e) {
      throw ParseError("note log record " + std::to_string(record) + ": " + e.what());
    }
    ++record;
  }
  return notes;
}

}  // namespace simhra
