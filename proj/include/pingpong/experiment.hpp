#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pingpong {

struct RunSpec {
  std::string attack = "none";
  std::string control = "computational";
  std::size_t dim = 2;
  std::string kind = "qubit";
  std::size_t cycles = 1000;  // protocol cycles in the session run
  double control_prob = 0.5;
  std::size_t trials = 10000;  // dedicated control cycles for the p_det estimate
  std::uint64_t seed = 1;

  bool operator==(const RunSpec&) const = default;
};

struct ExperimentSpec {
  std::vector<RunSpec> runs;
};

// Rates are NaN (null in JSON, empty in CSV) when no cycle of that kind ran
// or the run failed.
struct RunResult {
  RunSpec spec;
  std::optional<std::string> error;
  double pdet_analytic = 0.0;
  double pdet_empirical = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t control_trials = 0;
  std::size_t control_failures = 0;
  std::size_t message_cycles = 0;
  double eve_mu_accuracy = 0.0;
  double eve_nu_accuracy = 0.0;
  double message_integrity = 0.0;
  std::size_t session_control_cycles = 0;
  std::size_t session_control_failures = 0;
  double wall_clock_s = 0.0;
};

struct ExperimentReport {
  std::vector<RunResult> runs;

  bool all_ok() const;
};

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(std::string_view name);

// Accepts either {"runs": [...]} or a bare array of run objects. Missing
// fields take the RunSpec defaults.
ExperimentSpec parse_spec_json(std::string_view text);
ExperimentSpec load_spec_file(const std::string& path);

// Never throws for a bad run: the error is recorded and the other runs proceed.
RunResult run_single(const RunSpec& spec);
// Runs in parallel up to `jobs`; output order follows spec order.
ExperimentReport run_experiments(const ExperimentSpec& spec, unsigned jobs = 1);

// Field names and CSV columns are fixed; numbers carry 12 significant digits.
std::string to_json(const ExperimentReport& report);
std::string to_csv(const ExperimentReport& report);
std::string render(const ExperimentReport& report, ReportFormat format);
ExperimentReport report_from_json(std::string_view text);
const std::vector<std::string>& report_columns();

// Writes to `path`, or to stdout when path is "-". Throws std::runtime_error on
// I/O failure.
void emit(const ExperimentReport& report, ReportFormat format, const std::string& path);

}  // namespace pingpong
