#include "simhra/engine.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "simhra/dialogue.hpp"
#include "simhra/errors.hpp"
#include "simhra/fs_util.hpp"

namespace simhra {

using nlohmann::json;

std::string to_string(RunStatus s) {
  return s == RunStatus::Completed ? "COMPLETED" : "INFRA_FAIL";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "COMPLETED") return RunStatus::Completed;
  if (s == "INFRA_FAIL") return RunStatus::InfraFail;
  throw ParseError("unknown run status: " + s);
}

namespace {

std::string merged_world_text(const Scenario& scenario, int round) {
  std::string text;
  for (const auto& event : scenario.timeline) {
    if (event.round != round) continue;
    if (!text.empty()) text += '\n';
    text += event.description;
  }
  return text;
}

std::vector<std::string> guidance_for(const std::vector<ModeratorNote>& notes, Role role,
                                      int round) {
  std::vector<std::string> texts;
  for (const auto& note : notes) {
    if (note.round_applies == round && note.target_agent == role) {
      texts.push_back(note.text);
    }
  }
  return texts;
}

}  // namespace

RunRecord run_simulation(const Scenario& scenario, TurnBackend& backend, const RunConfig& cfg,
                         const NoteTemplates& templates) {
  if (const auto violations = validate_scenario(scenario); !violations.empty()) {
    throw ConfigError("scenario " + scenario.scenario_id + " is invalid: " + violations.front());
  }
  if (cfg.run_id.empty()) throw ConfigError("run_id must be non-empty");
  std::filesystem::create_directories(cfg.output_dir);

  RunRecord record;
  record.run_id = cfg.run_id;
  record.transcript_path = cfg.output_dir / (cfg.run_id + ".jsonl");
  record.note_log_path = cfg.output_dir / (cfg.run_id + ".jsonl.moderator");
  record.backend_kind = backend.kind();
  record.seed = cfg.seed;

  const auto started = std::chrono::steady_clock::now();
  DialogueBuffer buffer;
  std::vector<ModeratorNote> notes;

  auto elapsed = [&started]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  try {
    for (int round = 1; round <= scenario.temporal.total_rounds; ++round) {
      // World events first; several events in one round merge into one entry
      // so (round, turn_index) stays strictly increasing.
      if (std::string world = merged_world_text(scenario, round); !world.empty()) {
        Utterance event;
        event.run_id = cfg.run_id;
        event.round = round;
        event.turn_index = 0;
        event.speaker = Speaker::world();
        event.text = std::move(world);
        buffer.append(std::move(event));
      }

      int turn = 1;
      for (Role role : kAllRoles) {
        TurnRequest req;
        req.role = scenario.role(role);
        req.history_rendering = render_context(buffer);
        req.hidden_guidance = guidance_for(notes, role, round);
        req.round = round;
        req.decoding = DecodingParams::role_play();
        req.seed = cfg.seed;

        Utterance u = backend.generate_turn(req);
        u.run_id = cfg.run_id;
        u.round = round;
        u.turn_index = turn++;
        u.speaker = Speaker::agent(role);
        buffer.append(std::move(u));
      }

      if (cfg.moderator_enabled) {
        const auto findings = evaluate_round(scenario, buffer, round);
        const auto issued = issue_notes(findings, scenario, templates);
        notes.insert(notes.end(), issued.begin(), issued.end());
      }
    }
  } catch (const TransportError&) {
    const std::filesystem::path partial = record.transcript_path.string() + ".partial";
    save_transcript(buffer, partial);
    record.transcript_path = partial;
    record.note_log_path.clear();
    record.status = RunStatus::InfraFail;
    record.wall_time_seconds = elapsed();
    return record;
  }

  save_transcript(buffer, record.transcript_path);
  save_note_log(notes, record.note_log_path);
  record.status = RunStatus::Completed;
  record.wall_time_seconds = elapsed();
  return record;
}

RunRecord run_simulation(const RunConfig& cfg) {
  const Scenario scenario = load_scenario(cfg.scenario_id);
  auto backend = make_backend(cfg.backend);
  return run_simulation(scenario, *backend, cfg);
}

namespace {

std::string run_name(int index) {
  std::ostringstream out;
  out << "run-";
  if (index < 100) out << (index < 10 ? "00" : "0");
  out << index;
  return out.str();
}

}  // namespace

std::vector<RunRecord> run_batch(const BatchOptions& options) {
  if (options.n_runs < 1) {
    throw ConfigError("n_runs must be >= 1, got " + std::to_string(options.n_runs));
  }
  const Scenario scenario = load_scenario(options.scenario_source);
  if (const auto violations = validate_scenario(scenario); !violations.empty()) {
    throw ConfigError("scenario " + scenario.scenario_id + " is invalid: " + violations.front());
  }

  const std::filesystem::path manifest_path = options.output_dir / kManifestFilename;
  if (std::filesystem::exists(manifest_path) && !options.force) {
    throw ConfigError("output directory already holds a batch manifest; pass force to overwrite");
  }
  std::filesystem::create_directories(options.output_dir);

  auto backend = make_backend(options.backend);  // shared across runs

  std::vector<RunRecord> records(static_cast<std::size_t>(options.n_runs));
  std::atomic<int> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= options.n_runs) return;
      try {
        RunConfig cfg;
        cfg.scenario_id = options.scenario_source;
        cfg.backend = options.backend;
        cfg.seed = options.base_seed + i;
        cfg.run_id = run_name(i);
        cfg.output_dir = options.output_dir;
        cfg.moderator_enabled = options.moderator_enabled;
        records[static_cast<std::size_t>(i)] =
            run_simulation(scenario, *backend, cfg, options.templates);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::max(1, std::min(options.max_parallel, options.n_runs));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) workers.emplace_back(worker);
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);

  BatchManifest manifest;
  manifest.scenario_source = options.scenario_source;
  manifest.scenario_id = scenario.scenario_id;
  manifest.base_seed = options.base_seed;
  manifest.backend_kind = options.backend.kind;
  for (const auto& record : records) {
    manifest.entries.push_back(ManifestEntry{record, std::nullopt});
  }
  save_manifest(manifest, options.output_dir);
  return records;
}

namespace {

json record_to_json(const RunRecord& r, const std::filesystem::path& dir) {
  auto relative = [&dir](const std::filesystem::path& p) {
    return p.empty() ? std::string() : std::filesystem::relative(p, dir).string();
  };
  return json{{"run_id", r.run_id},
              {"transcript", relative(r.transcript_path)},
              {"notes", relative(r.note_log_path)},
              {"status", to_string(r.status)},
              {"wall_time_seconds", r.wall_time_seconds},
              {"backend", to_string(r.backend_kind)},
              {"seed", r.seed}};
}

}  // namespace

void save_manifest(const BatchManifest& manifest, const std::filesystem::path& dir) {
  json runs = json::array();
  for (const auto& entry : manifest.entries) {
    json doc = record_to_json(entry.record, dir);
    if (entry.extraction) {
      json extraction{{"status", entry.extraction->status},
                      {"extractor", entry.extraction->extractor}};
      if (!entry.extraction->reason.empty()) extraction["reason"] = entry.extraction->reason;
      if (!entry.extraction->metrics_path.empty()) {
        extraction["metrics"] = entry.extraction->metrics_path;
      }
      doc["extraction"] = std::move(extraction);
    }
    runs.push_back(std::move(doc));
  }
  const json doc{{"scenario_source", manifest.scenario_source},
                 {"scenario_id", manifest.scenario_id},
                 {"base_seed", manifest.base_seed},
                 {"backend", to_string(manifest.backend_kind)},
                 {"runs", runs}};
  write_text_file_atomic(dir / kManifestFilename, doc.dump(2) + "\n");
}

BatchManifest load_manifest(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / kManifestFilename;
  if (!std::filesystem::exists(path)) {
    throw NotFoundError("no batch manifest in " + dir.string());
  }
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  BatchManifest manifest;
  try {
    manifest.scenario_source = doc.at("scenario_source").get<std::string>();
    manifest.scenario_id = doc.at("scenario_id").get<std::string>();
    manifest.base_seed = doc.at("base_seed").get<long>();
    manifest.backend_kind = backend_kind_from_string(doc.at("backend").get<std::string>());
    for (const auto& run : doc.at("runs")) {
      ManifestEntry entry;
      entry.record.run_id = run.at("run_id").get<std::string>();
      const std::string transcript = run.at("transcript").get<std::string>();
      entry.record.transcript_path = transcript.empty() ? std::filesystem::path() : dir / transcript;
      const std::string notes = run.at("notes").get<std::string>();
      entry.record.note_log_path = notes.empty() ? std::filesystem::path() : dir / notes;
      entry.record.status = run_status_from_string(run.at("status").get<std::string>());
      entry.record.wall_time_seconds = run.at("wall_time_seconds").get<double>();
      entry.record.backend_kind = backend_kind_from_string(run.at("backend").get<std::string>());
      entry.record.seed = run.at("seed").get<long>();
      if (run.contains("extraction")) {
        const json& e = run["extraction"];
        ExtractionRecord extraction;
        extraction.status = e.at("status").get<std::string>();
        extraction.extractor = e.at("extractor").get<std::string>();
        if (e.contains("reason")) extraction.reason = e["reason"].get<std::string>();
        if (e.contains("metrics")) extraction.metrics_path = e["metrics"].get<std::string>();
        entry.extraction = std::move(extraction);
      }
      manifest.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return manifest;
}

}  // namespace simhra
