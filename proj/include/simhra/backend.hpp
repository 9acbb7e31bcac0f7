#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simhra/dialogue.hpp"
#include "simhra/scenario.hpp"

namespace simhra {

inline constexpr double kRolePlayTemperature = 0.7;
inline constexpr double kEvaluationTemperature = 0.2;
inline constexpr int kMaxTokensPerTurn = 800;

struct DecodingParams {
  double temperature = kRolePlayTemperature;
  int max_tokens_per_turn = kMaxTokensPerTurn;

  static DecodingParams role_play() { return {kRolePlayTemperature, kMaxTokensPerTurn}; }
  static DecodingParams evaluation() { return {kEvaluationTemperature, kMaxTokensPerTurn}; }
};

enum class BackendKind { Llm, Scripted };
std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& s);

struct BackendConfig {
  BackendKind kind = BackendKind::Scripted;
  std::string endpoint_base;                       // llm; falls back to SIMHRA_API_BASE
  std::string api_key_source = "SIMHRA_API_KEY";   // environment variable name
  std::string model_name;                          // llm
  std::string script_source;                       // scripted: path or builtin scenario id
};

/// Everything one agent turn is generated from: the role, the public history
/// rendering, and any hidden guidance issued for this agent in the previous
/// round. Guidance never appears in the history.
struct TurnRequest {
  RoleSpec role;
  std::string history_rendering;
  std::vector<std::string> hidden_guidance;
  int round = 0;
  DecodingParams decoding;
  std::optional<long> seed;  // request-level seed, forwarded when the endpoint supports it
};

struct ChatMessage {
  std::string role;  // "system" | "user"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

/// system: role prompt plus hidden guidance; user: history plus the round
/// instruction. Deterministic for equal inputs.
std::vector<ChatMessage> assemble_prompt(const TurnRequest& req);

class TurnBackend {
 public:
  virtual ~TurnBackend() = default;
  /// Returns the utterance text (and, for scripted backends, annotations).
  /// run_id and turn_index are filled in by the engine.
  virtual Utterance generate_turn(const TurnRequest& req) = 0;
  virtual BackendKind kind() const = 0;
};

/// Raw chat-completion surface, shared by the LLM turn backend and the LLM
/// report extractor.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages,
                               const DecodingParams& decoding,
                               std::optional<long> seed = std::nullopt) = 0;
};

// --- scripted backend ---------------------------------------------------

struct ScriptEntry {
  Role role = Role::Authority;
  int round = 0;
  std::string text;
  std::optional<AnnotationSet> annotations;
};

struct TurnScript {
  std::string scenario_id;
  std::map<std::pair<int, Role>, ScriptEntry> entries;  // keyed by (round, role)

  const ScriptEntry* find(int round, Role role) const;
};

TurnScript parse_script_text(const std::string& text);
/// Accepts a builtin scenario id or a script file path.
TurnScript load_script(const std::string& source);
bool has_builtin_script(const std::string& scenario_id);
const std::string& builtin_script_text(const std::string& scenario_id);

/// Replays a fixed script keyed by (scenario, role, round); byte-identical
/// output across invocations, which is what golden-replay tests rely on.
class ScriptedBackend : public TurnBackend {
 public:
  explicit ScriptedBackend(TurnScript script);

  Utterance generate_turn(const TurnRequest& req) override;
  BackendKind kind() const override { return BackendKind::Scripted; }
  const std::string& scenario_id() const { return script_.scenario_id; }

 private:
  TurnScript script_;
};

// --- LLM backend ----------------------------------------------------------

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};  // doubles per attempt
};

struct LlmOptions {
  std::string endpoint_base;  // e.g. https://host/v1
  std::string api_key;
  std::string model;
  RetryPolicy retry{};
  int max_in_flight = 4;
};

/// OpenAI-compatible chat-completions client, streaming disabled.
/// Transport failures are retried with exponential backoff; an exhausted
/// budget throws TransportError.
class LlmChatClient : public ChatClient {
 public:
  explicit LlmChatClient(LlmOptions options);
  ~LlmChatClient() override;

  std::string complete(const std::vector<ChatMessage>& messages,
                       const DecodingParams& decoding,
                       std::optional<long> seed = std::nullopt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class LlmBackend : public TurnBackend {
 public:
  explicit LlmBackend(LlmOptions options);
  explicit LlmBackend(std::shared_ptr<ChatClient> client);

  Utterance generate_turn(const TurnRequest& req) override;
  BackendKind kind() const override { return BackendKind::Llm; }

 private:
  std::shared_ptr<ChatClient> client_;
};

/// Reads the environment variable, empty optional when unset or blank.
std::optional<std::string> env_value(const std::string& name);

/// Builds a backend from configuration; throws ConfigError when required
/// pieces (script, endpoint, API key, model) are missing.
std::unique_ptr<TurnBackend> make_backend(const BackendConfig& config);

}  // namespace simhra
