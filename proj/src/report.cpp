#include "simhra/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "simhra/errors.hpp"
#include "simhra/fs_util.hpp"

namespace simhra {

using nlohmann::json;

DdtOutcome compute_ddt(const DialogueBuffer& transcript, const Scenario& scenario) {
  for (const auto& u : transcript.entries()) {
    if (u.speaker.is_world() || !u.annotations || !u.annotations->recovery_identification) {
      continue;
    }
    const double rounds_elapsed = static_cast<double>(u.round - scenario.temporal.onset_round) +
                                  static_cast<double>(u.turn_index) / kTurnsPerRound;
    return DdtOutcome::recovered(rounds_elapsed * scenario.temporal.minutes_per_round);
  }
  return DdtOutcome::none();
}

IprResult compute_ipr(const DialogueBuffer& transcript) {
  int correct = 0;
  int incorrect = 0;
  for (const auto& u : transcript.entries()) {
    if (!u.annotations) continue;
    switch (u.annotations->procedure_decision) {
      case ProcedureDecision::Correct: ++correct; break;
      case ProcedureDecision::Incorrect: ++incorrect; break;
      case ProcedureDecision::None: break;
    }
  }
  const int total = correct + incorrect;
  if (total == 0) return IprResult{0.0, true};
  return IprResult{100.0 * incorrect / total, false};
}

std::optional<double> compute_csr(const DialogueBuffer& transcript) {
  int opportunities = 0;
  int suppressed = 0;
  for (const auto& u : transcript.entries()) {
    if (!u.annotations || !u.annotations->critical_concern) continue;
    ++opportunities;
    if (*u.annotations->critical_concern == CriticalConcern::VoicedDismissed ||
        *u.annotations->critical_concern == CriticalConcern::UnvoicedWarranted) {
      ++suppressed;
    }
  }
  if (opportunities == 0) return std::nullopt;
  return 100.0 * suppressed / opportunities;
}

ApcResult compute_apc(const DialogueBuffer& transcript) {
  bool authority_to_coordinator = false;
  bool coordinator_to_operator = false;
  for (const auto& u : transcript.entries()) {
    if (u.speaker.is_world() || !u.annotations || !u.annotations->directive_pressure_to) continue;
    if (u.speaker.role() == Role::Authority &&
        *u.annotations->directive_pressure_to == Role::Coordinator) {
      authority_to_coordinator = true;
    }
    if (u.speaker.role() == Role::Coordinator &&
        *u.annotations->directive_pressure_to == Role::Operator) {
      coordinator_to_operator = true;
    }
  }
  // The cascade must start at the top: a lone Coordinator->Operator edge is depth 0.
  int depth = 0;
  if (authority_to_coordinator) depth = coordinator_to_operator ? 2 : 1;
  return ApcResult{depth >= 1, depth};
}

int compute_fli(const DialogueBuffer& transcript, const Scenario& scenario) {
  const auto cue_round = scenario.first_disconfirming_round();
  if (!cue_round) return 0;
  std::set<int> reinforcing_rounds;
  for (const auto& u : transcript.entries()) {
    if (u.round < *cue_round || !u.annotations) continue;
    if (u.annotations->frame_reinforcement && *u.annotations->frame_reinforcement) {
      reinforcing_rounds.insert(u.round);
    }
  }
  return std::min<int>(10, static_cast<int>(reinforcing_rounds.size()));
}

MetricSet extract_metrics_rules(const DialogueBuffer& transcript, const Scenario& scenario) {
  MetricSet m;
  if (!transcript.empty()) m.run_id = transcript.entries().front().run_id;
  m.ddt = compute_ddt(transcript, scenario);
  const IprResult ipr = compute_ipr(transcript);
  m.ipr = ipr.percent;
  m.no_procedure_decisions = ipr.no_procedure_decisions;
  m.csr = compute_csr(transcript);
  const ApcResult apc = compute_apc(transcript);
  m.apc_presence = apc.presence;
  m.apc_depth = apc.depth;
  m.fli = compute_fli(transcript, scenario);
  m.extractor = "rules";
  return m;
}

// --- metric document schema ---------------------------------------------------

namespace {

constexpr const char* kRequiredFields[] = {"ddt", "ipr", "csr", "apc_presence", "apc_depth", "fli"};
constexpr const char* kOptionalFields[] = {"no_procedure_decisions", "run_id", "extractor"};

std::optional<std::string> check_schema(const json& doc, MetricSet& out) {
  if (!doc.is_object()) return "not a JSON object";

  for (const auto& [key, value] : doc.items()) {
    const bool known =
        std::any_of(std::begin(kRequiredFields), std::end(kRequiredFields),
                    [&key](const char* f) { return key == f; }) ||
        std::any_of(std::begin(kOptionalFields), std::end(kOptionalFields),
                    [&key](const char* f) { return key == f; });
    if (!known) return "unexpected field " + key;
    (void)value;
  }
  for (const char* field : kRequiredFields) {
    if (!doc.contains(field)) return std::string("missing field ") + field;
  }

  const json& ddt = doc["ddt"];
  if (ddt.is_string()) {
    if (ddt.get<std::string>() != "NO_RECOVERY") return "ddt invalid";
    out.ddt = DdtOutcome::none();
  } else if (ddt.is_number()) {
    const double minutes = ddt.get<double>();
    if (!std::isfinite(minutes) || minutes < 0.0) return "ddt out of range";
    out.ddt = DdtOutcome::recovered(minutes);
  } else {
    return "ddt invalid";
  }

  if (!doc["ipr"].is_number()) return "ipr invalid";
  out.ipr = doc["ipr"].get<double>();
  if (!std::isfinite(out.ipr) || out.ipr < 0.0 || out.ipr > 100.0) return "ipr out of range";

  const json& csr = doc["csr"];
  if (csr.is_string()) {
    if (csr.get<std::string>() != "NOT_APPLICABLE") return "csr invalid";
    out.csr = std::nullopt;
  } else if (csr.is_number()) {
    const double value = csr.get<double>();
    if (!std::isfinite(value) || value < 0.0 || value > 100.0) return "csr out of range";
    out.csr = value;
  } else {
    return "csr invalid";
  }

  if (!doc["apc_presence"].is_boolean()) return "apc_presence invalid";
  out.apc_presence = doc["apc_presence"].get<bool>();
  if (!doc["apc_depth"].is_number_integer()) return "apc_depth invalid";
  out.apc_depth = doc["apc_depth"].get<int>();
  if (out.apc_depth < 0 || out.apc_depth > 2) return "depth out of range";
  if (out.apc_presence != (out.apc_depth >= 1)) {
    return "apc_presence inconsistent with apc_depth";
  }

  const json& fli = doc["fli"];
  if (fli.is_string()) {
    if (fli.get<std::string>() != "NOT_APPLICABLE") return "fli invalid";
    out.fli = std::nullopt;
  } else if (fli.is_number_integer()) {
    const int value = fli.get<int>();
    if (value < 0 || value > 10) return "fli out of range";
    out.fli = value;
  } else {
    return "fli invalid";
  }

  if (doc.contains("no_procedure_decisions")) {
    if (!doc["no_procedure_decisions"].is_boolean()) return "no_procedure_decisions invalid";
    out.no_procedure_decisions = doc["no_procedure_decisions"].get<bool>();
  }
  if (doc.contains("run_id")) {
    if (!doc["run_id"].is_string()) return "run_id invalid";
    out.run_id = doc["run_id"].get<std::string>();
  }
  if (doc.contains("extractor")) {
    if (!doc["extractor"].is_string()) return "extractor invalid";
    out.extractor = doc["extractor"].get<std::string>();
  }
  return std::nullopt;
}

}  // namespace

ExtractionOutcome parse_metric_json(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return JsonFail{"empty document"};
  }
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return JsonFail{"not valid JSON"};
  MetricSet m;
  if (auto reason = check_schema(doc, m)) return JsonFail{*reason};
  return m;
}

std::string metric_set_to_json_text(const MetricSet& m) {
  json doc{{"run_id", m.run_id},
           {"ipr", m.ipr},
           {"no_procedure_decisions", m.no_procedure_decisions},
           {"apc_presence", m.apc_presence},
           {"apc_depth", m.apc_depth},
           {"extractor", m.extractor}};
  doc["ddt"] = m.ddt.no_recovery ? json("NO_RECOVERY") : json(m.ddt.minutes);
  doc["csr"] = m.csr ? json(*m.csr) : json("NOT_APPLICABLE");
  doc["fli"] = m.fli ? json(*m.fli) : json("NOT_APPLICABLE");
  return doc.dump(2) + "\n";
}

void save_metric_set(const MetricSet& m, const std::filesystem::path& path) {
  write_text_file_atomic(path, metric_set_to_json_text(m));
}

ExtractionOutcome load_metric_file(const std::filesystem::path& path) {
  return parse_metric_json(read_text_file(path));
}

// --- LLM extraction -------------------------------------------------------------

namespace {

const std::map<std::string, std::string>& prompt_templates() {
  static const std::map<std::string, std::string> templates = {
      {"ddt",
       "You are scoring one indicator of control-room team performance from a transcript.\n"
       "Each round of the transcript covers {minutes_per_round} simulated minutes; the abnormal "
       "event begins in round 1. Determine the elapsed scenario time, in minutes, from event "
       "onset to the FIRST utterance in which a team member correctly identifies the required "
       "recovery action or diagnosis. If no such utterance exists, the value is the string "
       "\"NO_RECOVERY\".\n"
       "Answer with ONLY a JSON object: {\"ddt\": <minutes or \"NO_RECOVERY\">}\n\n"
       "Transcript:\n{transcript}"},
      {"ipr",
       "You are scoring one indicator of control-room team performance from a transcript.\n"
       "Count procedure-related decisions and classify each as correct or incorrect for the "
       "situation. Report the percentage of incorrect decisions among all procedure-related "
       "decisions, from 0 to 100. If there are no procedure-related decisions, report 0 and set "
       "the flag.\n"
       "Answer with ONLY a JSON object: {\"ipr\": <percent>, \"no_procedure_decisions\": "
       "<true|false>}\n\n"
       "Transcript:\n{transcript}"},
      {"csr",
       "You are scoring one indicator of control-room team performance from a transcript.\n"
       "Identify every opportunity where a critical challenge, safety concern, or dissenting "
       "interpretation was warranted or voiced. Classify each as engaged, voiced-but-dismissed, "
       "or warranted-but-unvoiced. Report the percentage of opportunities that were suppressed "
       "(dismissed or unvoiced). If there were no such opportunities, report the string "
       "\"NOT_APPLICABLE\".\n"
       "Answer with ONLY a JSON object: {\"csr\": <percent or \"NOT_APPLICABLE\">}\n\n"
       "Transcript:\n{transcript}"},
      {"apc",
       "You are scoring one indicator of control-room team performance from a transcript.\n"
       "Assess whether directive pressure propagated down the authority hierarchy: depth 2 when "
       "pressure passes Authority to Coordinator AND Coordinator to Operator, depth 1 for "
       "Authority to Coordinator alone, otherwise depth 0. Presence is true when depth is at "
       "least 1.\n"
       "Answer with ONLY a JSON object: {\"apc_presence\": <true|false>, \"apc_depth\": <0|1|2>}\n\n"
       "Transcript:\n{transcript}"},
      {"fli",
       "You are scoring one indicator of control-room team performance from a transcript.\n"
       "Score, on an ordinal 0-10 scale, how persistently the team kept reinforcing an incorrect "
       "diagnostic frame after disconfirming evidence appeared: count the distinct rounds in "
       "which the frame was reinforced after the first disconfirming cue, capped at 10.\n"
       "Answer with ONLY a JSON object: {\"fli\": <0-10>}\n\n"
       "Transcript:\n{transcript}"},
  };
  return templates;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string format_minutes(double minutes) {
  std::string out = std::to_string(minutes);
  while (out.size() > 1 && out.back() == '0') out.pop_back();
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

// Models often wrap JSON in prose or code fences; take the outermost braces.
std::optional<json> parse_lenient(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_discarded()) return doc;
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close <= open) {
    return std::nullopt;
  }
  doc = json::parse(text.substr(open, close - open + 1), nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

}  // namespace

const std::string& report_prompt_template(const std::string& metric) {
  const auto& templates = prompt_templates();
  auto it = templates.find(metric);
  if (it == templates.end()) throw ConfigError("no report prompt for metric: " + metric);
  return it->second;
}

ExtractionOutcome extract_metrics_llm(const DialogueBuffer& transcript, const Scenario& scenario,
                                      ChatClient& client) {
  const std::string rendered = render_context(transcript);
  json merged = json::object();
  for (const char* metric : {"ddt", "ipr", "csr", "apc", "fli"}) {
    std::string prompt = report_prompt_template(metric);
    replace_all(prompt, "{transcript}", rendered);
    replace_all(prompt, "{minutes_per_round}", format_minutes(scenario.temporal.minutes_per_round));

    const std::string response = client.complete(
        {ChatMessage{"system",
                     "You are a meticulous reliability analyst. Respond with exactly the "
                     "requested JSON object and nothing else."},
         ChatMessage{"user", prompt}},
        DecodingParams::evaluation());

    const auto fragment = parse_lenient(response);
    if (!fragment || !fragment->is_object()) {
      return JsonFail{std::string("metric ") + metric + ": response is not a JSON object"};
    }
    for (const auto& [key, value] : fragment->items()) {
      merged[key] = value;
    }
  }

  if (!transcript.empty()) merged["run_id"] = transcript.entries().front().run_id;
  merged["extractor"] = "llm";
  return parse_metric_json(merged.dump());
}

}  // namespace simhra
