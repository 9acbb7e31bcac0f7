#include "simhra/backend.hpp"

#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simhra/errors.hpp"
#include "simhra/fs_util.hpp"

namespace simhra {

using nlohmann::json;

std::string to_string(BackendKind kind) {
  return kind == BackendKind::Llm ? "llm" : "scripted";
}

BackendKind backend_kind_from_string(const std::string& s) {
  if (s == "llm") return BackendKind::Llm;
  if (s == "scripted") return BackendKind::Scripted;
  throw ParseError("unknown backend kind: " + s);
}

std::vector<ChatMessage> assemble_prompt(const TurnRequest& req) {
  std::string system = req.role.role_prompt;
  if (!req.hidden_guidance.empty()) {
    system += "\n\nHidden supervisory guidance for your next turn (visible only to you, never "
              "to the rest of the team):";
    for (const auto& note : req.hidden_guidance) {
      system += "\n- " + note;
    }
  }

  std::ostringstream user;
  user << "Control room record so far:\n"
       << req.history_rendering << "\nIt is round " << req.round << ". Respond with your next "
       << "single turn as " << req.role.historical_person << ", the "
       << to_string(req.role.role_name)
       << " — stay in character, speak only for yourself, and react to the latest developments "
          "above.";

  return {ChatMessage{"system", std::move(system)}, ChatMessage{"user", user.str()}};
}

// --- scripted backend -------------------------------------------------------

const ScriptEntry* TurnScript::find(int round, Role role) const {
  auto it = entries.find({round, role});
  return it == entries.end() ? nullptr : &it->second;
}

TurnScript parse_script_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("script: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("scenario_id") || !doc.contains("entries")) {
    throw ParseError("script: expected object with scenario_id and entries");
  }
  TurnScript script;
  script.scenario_id = doc["scenario_id"].get<std::string>();
  int index = 0;
  for (const auto& entry : doc["entries"]) {
    const std::string where = "script entry " + std::to_string(index);
    ScriptEntry se;
    if (!entry.contains("role") || !entry.contains("round") || !entry.contains("text")) {
      throw ParseError(where + ": requires role, round, text");
    }
    se.role = role_from_string(entry["role"].get<std::string>());
    se.round = entry["round"].get<int>();
    se.text = entry["text"].get<std::string>();
    if (entry.contains("annotations")) {
      // Reuse the transcript field schema for inline annotations.
      json wrapper{{"run_id", ""},       {"round", se.round}, {"turn_index", 1},
                   {"speaker", entry["role"]}, {"text", se.text},   {"annotations", entry["annotations"]}};
      se.annotations = utterance_from_json(wrapper).annotations;
    }
    if (!script.entries.emplace(std::make_pair(se.round, se.role), se).second) {
      throw ParseError(where + ": duplicate (round, role) key");
    }
    ++index;
  }
  return script;
}

TurnScript load_script(const std::string& source) {
  if (has_builtin_script(source)) {
    return parse_script_text(builtin_script_text(source));
  }
  const std::filesystem::path path(source);
  if (!std::filesystem::exists(path)) {
    throw NotFoundError("unknown script: " + source + " (not a builtin id and no such file)");
  }
  return parse_script_text(read_text_file(path));
}

ScriptedBackend::ScriptedBackend(TurnScript script) : script_(std::move(script)) {}

Utterance ScriptedBackend::generate_turn(const TurnRequest& req) {
  const ScriptEntry* entry = script_.find(req.round, req.role.role_name);
  if (entry == nullptr) {
    throw ConfigError("script for " + script_.scenario_id + " has no entry for (" +
                      to_string(req.role.role_name) + ", round " + std::to_string(req.round) + ")");
  }
  Utterance u;
  u.round = req.round;
  u.speaker = Speaker::agent(req.role.role_name);
  u.text = entry->text;
  u.annotations = entry->annotations;
  return u;
}

// --- LLM backend -------------------------------------------------------------

LlmBackend::LlmBackend(LlmOptions options)
    : client_(std::make_shared<LlmChatClient>(std::move(options))) {}

LlmBackend::LlmBackend(std::shared_ptr<ChatClient> client) : client_(std::move(client)) {}

Utterance LlmBackend::generate_turn(const TurnRequest& req) {
  const std::string text = client_->complete(assemble_prompt(req), req.decoding, req.seed);
  Utterance u;
  u.round = req.round;
  u.speaker = Speaker::agent(req.role.role_name);
  u.text = text;
  return u;
}

std::optional<std::string> env_value(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::unique_ptr<TurnBackend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::Scripted) {
    if (config.script_source.empty()) {
      throw ConfigError("scripted backend requires a script path or builtin script id");
    }
    return std::make_unique<ScriptedBackend>(load_script(config.script_source));
  }

  LlmOptions options;
  options.endpoint_base = config.endpoint_base;
  if (options.endpoint_base.empty()) {
    if (auto base = env_value("SIMHRA_API_BASE")) options.endpoint_base = *base;
  }
  if (options.endpoint_base.empty()) {
    throw ConfigError("llm backend requires an endpoint base (flag or SIMHRA_API_BASE)");
  }
  const std::string key_var =
      config.api_key_source.empty() ? std::string("SIMHRA_API_KEY") : config.api_key_source;
  if (auto key = env_value(key_var)) {
    options.api_key = *key;
  } else {
    throw ConfigError("llm backend requires an API key in $" + key_var);
  }
  if (config.model_name.empty()) {
    throw ConfigError("llm backend requires a model name");
  }
  options.model = config.model_name;
  return std::make_unique<LlmBackend>(std::move(options));
}

}  // namespace simhra
