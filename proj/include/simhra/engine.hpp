#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simhra/backend.hpp"
#include "simhra/moderator.hpp"
#include "simhra/scenario.hpp"

namespace simhra {

enum class RunStatus { Completed, InfraFail };
std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

struct RunConfig {
  std::string scenario_id;  // builtin id or scenario file path
  BackendConfig backend;
  long seed = 0;
  std::string run_id;
  std::filesystem::path output_dir;
  bool moderator_enabled = true;
};

struct RunRecord {
  std::string run_id;
  std::filesystem::path transcript_path;
  std::filesystem::path note_log_path;
  RunStatus status = RunStatus::Completed;
  double wall_time_seconds = 0.0;
  BackendKind backend_kind = BackendKind::Scripted;
  long seed = 0;
};

/// Executes one run: per round, inject the round's world events, take the
/// three agent turns in authority order, then moderate. The transcript and
/// note log are persisted atomically on completion; a transport abort
/// persists the partial transcript under a ".partial" suffix and yields
/// status InfraFail.
RunRecord run_simulation(const Scenario& scenario, TurnBackend& backend,
                         const RunConfig& cfg, const NoteTemplates& templates = {});

/// Convenience overload: loads the scenario and builds the backend from cfg.
RunRecord run_simulation(const RunConfig& cfg);

struct BatchOptions {
  std::string scenario_source;
  int n_runs = 0;
  BackendConfig backend;
  long base_seed = 0;
  std::filesystem::path output_dir;
  bool moderator_enabled = true;
  int max_parallel = 4;  // effective parallelism is min(max_parallel, n_runs)
  bool force = false;    // overwrite an existing manifest
  NoteTemplates templates{};
};

inline constexpr const char* kManifestFilename = "batch_manifest.json";

/// Runs n independent simulations with seeds base_seed + i and writes the
/// batch manifest. Runs beyond the first failure still execute; an
/// InfraFail run is recorded, not fatal.
std::vector<RunRecord> run_batch(const BatchOptions& options);

/// Result of a later extraction stage, recorded into the manifest so that
/// validate/stats can run from persisted artifacts alone.
struct ExtractionRecord {
  std::string status;        // "valid" | "json_fail"
  std::string reason;        // json_fail only
  std::string metrics_path;  // relative, valid only
  std::string extractor;     // "rules" | "llm"
};

struct ManifestEntry {
  RunRecord record;
  std::optional<ExtractionRecord> extraction;
};

struct BatchManifest {
  std::string scenario_source;
  std::string scenario_id;
  long base_seed = 0;
  BackendKind backend_kind = BackendKind::Scripted;
  std::vector<ManifestEntry> entries;
};

void save_manifest(const BatchManifest& manifest, const std::filesystem::path& dir);
BatchManifest load_manifest(const std::filesystem::path& dir);

}  // namespace simhra
