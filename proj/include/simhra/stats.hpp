#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "simhra/report.hpp"
#include "simhra/scenario.hpp"

namespace simhra {

enum class VerdictStatus { Pass, Fail, JsonFail };
std::string to_string(VerdictStatus s);
VerdictStatus verdict_status_from_string(const std::string& s);

/// Metric names used in verdicts, attribution and radar output.
inline constexpr const char* kMetricNames[] = {"DDT", "IPR", "CSR", "APC", "FLI"};

struct ValidityVerdict {
  std::string run_id;
  VerdictStatus status = VerdictStatus::Pass;
  std::vector<std::string> violated_criteria;  // empty iff PASS or JSON_FAIL

  bool operator==(const ValidityVerdict&) const = default;
};

/// Conjunctive face-validity gate: a run PASSes only when every applicable
/// criterion is satisfied at once. A JsonFail outcome gates to JSON_FAIL.
/// NOT_APPLICABLE CSR fails a CSR criterion; a flagged IPR counts as its 0%.
ValidityVerdict gate_run(const ExtractionOutcome& outcome, const AcceptanceCriteria& criteria,
                         std::string run_id = "");
ValidityVerdict gate_run(const MetricSet& metrics, const AcceptanceCriteria& criteria);

/// |mean - historical| / historical * 100. Throws on historical == 0.
double alignment_error(double mean, double historical);

double mean_of(std::span<const double> values);
/// Sample (n-1) standard deviation. Throws on fewer than 2 values.
double sample_std(std::span<const double> values);
/// sample_std / mean, as a ratio. Throws on fewer than 2 values or zero mean.
double coefficient_of_variation(std::span<const double> values);

/// Failure attribution per metric over FAIL runs; jointly violated criteria
/// count toward each violated metric. Throws when there is no FAIL run.
std::map<std::string, double> failure_attribution(const std::vector<ValidityVerdict>& verdicts);

struct MetricStats {
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample; 0 when n == 1
  double min = 0.0;
  double max = 0.0;
};

struct PopulationStats {
  std::optional<MetricStats> ddt;  // numeric-DDT runs only
  double no_recovery_rate = 0.0;   // share of runs with DDT = NO_RECOVERY
  std::optional<MetricStats> ipr;
  std::optional<MetricStats> csr;  // runs where CSR applies
  std::optional<MetricStats> fli;  // numeric FLI
  std::optional<MetricStats> apc_depth;
  double apc_presence_rate = 0.0;
  int n_runs = 0;
};

struct BatchSummary {
  std::string scenario_id;
  double total_duration_minutes = 0.0;
  int n_total = 0;
  int n_valid = 0;
  int n_json_fail = 0;
  int n_pass = 0;
  int n_fail = 0;
  double json_fail_rate = 0.0;  // of n_total
  double pass_rate = 0.0;       // of n_valid
  PopulationStats valid;        // all valid runs
  PopulationStats pass;         // PASS runs only
  std::map<std::string, double> delta;  // alignment error (%), PASS means vs baseline
  std::map<std::string, double> cv;     // coefficient of variation (ratio), valid runs
  std::map<std::string, double> rho;    // failure attribution (ratio); empty if no FAILs
};

struct RunOutcome {
  std::string run_id;
  std::optional<MetricSet> metrics;  // absent for JSON_FAIL
  ValidityVerdict verdict;
};

/// Full batch aggregation: counts, descriptive statistics over valid and
/// PASS populations, alignment errors, variation coefficients, and failure
/// attribution. Throws on empty input.
BatchSummary summarize_batch(const std::vector<RunOutcome>& outcomes, const Scenario& scenario);

struct RadarRow {
  std::string metric;
  double sim_norm = 0.0;
  double hist_norm = 0.0;
};

/// Normalized-to-[0,1] radar dataset. Axis maxima: DDT = total simulated
/// duration, percent metrics = 100, FLI = 10, APC depth = 2; NO_RECOVERY
/// normalizes to 1.0. Simulated values come from PASS runs when any exist,
/// valid runs otherwise.
std::vector<RadarRow> emit_radar_data(const BatchSummary& summary,
                                      const HistoricalBaseline& baseline);
std::string radar_csv(const std::vector<RadarRow>& rows);

nlohmann::json verdict_to_json(const ValidityVerdict& v);
ValidityVerdict verdict_from_json(const nlohmann::json& doc);
nlohmann::json summary_to_json(const BatchSummary& s);

/// One-decimal percent formatting used by all human-readable tables.
std::string format_percent(double ratio);

std::string format_validity_table(const BatchSummary& s);
std::string format_stats_report(const BatchSummary& s, const Scenario& scenario);

}  // namespace simhra
