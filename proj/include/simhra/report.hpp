#pragma once

#include <optional>
#include <string>
#include <variant>

#include "simhra/backend.hpp"
#include "simhra/dialogue.hpp"
#include "simhra/scenario.hpp"

namespace simhra {

inline constexpr int kTurnsPerRound = 3;

/// One run's five team-level reliability indicators.
///   csr == nullopt  -> NOT_APPLICABLE (no critical-concern opportunities)
///   fli == nullopt  -> NOT_APPLICABLE (only reachable via the LLM path)
struct MetricSet {
  std::string run_id;
  DdtOutcome ddt;
  double ipr = 0.0;
  bool no_procedure_decisions = false;
  std::optional<double> csr;
  bool apc_presence = false;
  int apc_depth = 0;
  std::optional<int> fli;
  std::string extractor = "rules";

  bool operator==(const MetricSet&) const = default;
};

/// Elapsed scenario time from onset to the first utterance identifying the
/// correct recovery, interpolated by turn position within the round:
///   ((round - onset_round) + turn_index / 3) * minutes_per_round
DdtOutcome compute_ddt(const DialogueBuffer& transcript, const Scenario& scenario);

struct IprResult {
  double percent = 0.0;
  bool no_procedure_decisions = false;
};
/// incorrect / (correct + incorrect) * 100; a zero denominator yields 0%
/// with the no_procedure_decisions flag set.
IprResult compute_ipr(const DialogueBuffer& transcript);

/// suppressed / opportunities * 100, where an opportunity is any utterance
/// with critical_concern set and suppressed means voiced_dismissed or
/// unvoiced_warranted. No opportunities -> NOT_APPLICABLE.
std::optional<double> compute_csr(const DialogueBuffer& transcript);

struct ApcResult {
  bool presence = false;
  int depth = 0;
};
/// depth 2 when both Authority->Coordinator and Coordinator->Operator
/// directive edges occur, 1 for Authority->Coordinator alone, else 0.
ApcResult compute_apc(const DialogueBuffer& transcript);

/// Distinct rounds with a frame-reinforcing utterance at or after the first
/// disconfirming world cue, clamped to 10.
int compute_fli(const DialogueBuffer& transcript, const Scenario& scenario);

/// Deterministic composition of the five rule-based metrics.
MetricSet extract_metrics_rules(const DialogueBuffer& transcript, const Scenario& scenario);

struct JsonFail {
  std::string reason;

  bool operator==(const JsonFail&) const = default;
};

using ExtractionOutcome = std::variant<MetricSet, JsonFail>;

inline bool is_valid(const ExtractionOutcome& o) { return std::holds_alternative<MetricSet>(o); }
inline const MetricSet& metrics_of(const ExtractionOutcome& o) { return std::get<MetricSet>(o); }
inline const JsonFail& failure_of(const ExtractionOutcome& o) { return std::get<JsonFail>(o); }

/// Strict schema validation of a metric document: all five indicators
/// present, in range, and mutually consistent. Failures are data, not
/// exceptions.
ExtractionOutcome parse_metric_json(const std::string& text);

std::string metric_set_to_json_text(const MetricSet& m);
void save_metric_set(const MetricSet& m, const std::filesystem::path& path);
ExtractionOutcome load_metric_file(const std::filesystem::path& path);

/// Prompts the model once per indicator at evaluation temperature, merges
/// the per-metric JSON fragments, and validates the result. Malformed or
/// incomplete model output is a JsonFail; transport trouble still throws.
ExtractionOutcome extract_metrics_llm(const DialogueBuffer& transcript,
                                      const Scenario& scenario, ChatClient& client);

/// Versioned prompt template for one indicator ("ddt", "ipr", "csr", "apc",
/// "fli"); "{transcript}" and "{minutes_per_round}" expand at call time.
const std::string& report_prompt_template(const std::string& metric);

}  // namespace simhra
