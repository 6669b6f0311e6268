#include "pingpong/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pingpong/attacks.hpp"
#include "pingpong/control.hpp"
#include "pingpong/session.hpp"

namespace pingpong {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Keeps the p_det trials off the stream used by the session run.
constexpr std::uint64_t kTrialSalt = 0x636F6E74726F6CULL;
constexpr std::uint64_t kMessageStream = 1;

std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json number12(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(format12(x).c_str(), nullptr);
}

double read_number(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string csv_number(double x) { return std::isfinite(x) ? format12(x) : ""; }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

RunSpec run_from_json(const json& j) {
  RunSpec r;
  r.attack = j.value("attack", r.attack);
  r.control = j.value("control", r.control);
  r.dim = j.value("dim", r.dim);
  r.kind = j.value("kind", r.kind);
  r.cycles = j.value("cycles", r.cycles);
  r.control_prob = j.value("control_prob", r.control_prob);
  r.trials = j.value("trials", r.trials);
  r.seed = j.value("seed", r.seed);
  return r;
}

json run_to_json(const RunSpec& r) {
  return json{{"attack", r.attack}, {"control", r.control}, {"dim", r.dim},       {"kind", r.kind},
              {"cycles", r.cycles}, {"control_prob", number12(r.control_prob)}, {"trials", r.trials}, {"seed", r.seed}};
}

}  // namespace

bool ExperimentReport::all_ok() const {
  for (const auto& r : runs)
    if (r.error) return false;
  return true;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "'");
}

ExperimentSpec parse_spec_json(std::string_view text) {
  const json doc = json::parse(text);
  const json& runs = doc.is_array() ? doc : doc.at("runs");
  ExperimentSpec spec;
  for (const auto& r : runs) spec.runs.push_back(run_from_json(r));
  return spec;
}

ExperimentSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_json(ss.str());
}

RunResult run_single(const RunSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  out.spec = spec;
  try {
    ProtocolConfig cfg;
    cfg.dim = spec.dim;
    cfg.kind = parse_initial_kind(spec.kind);
    cfg.control_prob = spec.control_prob;
    cfg.n_cycles = std::max<std::size_t>(spec.cycles, 1);
    cfg.seed = spec.seed;
    cfg.validate();

    const Eavesdropper eve = make_attack(spec.attack, spec.dim, spec.seed);
    const ControlMode control = make_control(spec.control, spec.dim, cfg.kind);

    out.pdet_analytic = analytic_pdet(eve, control, cfg);
    out.pdet_empirical = kNaN;
    out.ci_low = kNaN;
    out.ci_high = kNaN;
    if (spec.trials > 0) {
      ProtocolConfig trial_cfg = cfg;
      trial_cfg.seed = mix64(spec.seed ^ kTrialSalt);
      const DetectionReport det = empirical_pdet(eve, control, trial_cfg, spec.trials);
      out.pdet_empirical = det.empirical;
      out.ci_low = det.ci.low;
      out.ci_high = det.ci.high;
      out.control_trials = det.trials;
      out.control_failures = det.failures;
    }

    SessionStats stats;
    if (spec.cycles > 0) {
      RngStream msg_rng(spec.seed, kMessageStream);
      const Message message = random_message(spec.dim, spec.cycles, msg_rng);
      stats = summarize(run_session(cfg, message, eve, control));
    }
    out.message_cycles = stats.message_cycles;
    out.eve_mu_accuracy = stats.eve_mu_accuracy();
    out.eve_nu_accuracy = stats.eve_nu_accuracy();
    out.message_integrity = stats.message_integrity();
    out.session_control_cycles = stats.control_cycles;
    out.session_control_failures = stats.control_failures;
  } catch (const std::exception& e) {
    out = RunResult{};
    out.spec = spec;
    out.error = e.what();
    out.pdet_analytic = out.pdet_empirical = out.ci_low = out.ci_high = kNaN;
    out.eve_mu_accuracy = out.eve_nu_accuracy = out.message_integrity = kNaN;
  }
  out.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ExperimentReport run_experiments(const ExperimentSpec& spec, unsigned jobs) {
  ExperimentReport report;
  report.runs.resize(spec.runs.size());
  jobs = std::max(1u, jobs);
  if (jobs == 1 || spec.runs.size() < 2) {
    for (std::size_t i = 0; i < spec.runs.size(); ++i) report.runs[i] = run_single(spec.runs[i]);
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(spec.runs.size()));
  for (unsigned w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < spec.runs.size(); i = next++) report.runs[i] = run_single(spec.runs[i]);
    });
  for (auto& t : pool) t.join();
  return report;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "attack",         "control",        "dim",
      "kind",           "cycles",         "control_prob",
      "trials",         "seed",           "error",
      "pdet_analytic",  "pdet_empirical", "ci_low",
      "ci_high",        "control_trials", "control_failures",
      "message_cycles", "eve_mu_accuracy", "eve_nu_accuracy",
      "message_integrity", "session_control_cycles", "session_control_failures",
      "wall_clock_s"};
  return cols;
}

std::string to_json(const ExperimentReport& report) {
  json arr = json::array();
  for (const auto& r : report.runs) {
    json j = run_to_json(r.spec);
    j["error"] = r.error ? json(*r.error) : json(nullptr);
    j["pdet_analytic"] = number12(r.pdet_analytic);
    j["pdet_empirical"] = number12(r.pdet_empirical);
    j["ci_low"] = number12(r.ci_low);
    j["ci_high"] = number12(r.ci_high);
    j["control_trials"] = r.control_trials;
    j["control_failures"] = r.control_failures;
    j["message_cycles"] = r.message_cycles;
    j["eve_mu_accuracy"] = number12(r.eve_mu_accuracy);
    j["eve_nu_accuracy"] = number12(r.eve_nu_accuracy);
    j["message_integrity"] = number12(r.message_integrity);
    j["session_control_cycles"] = r.session_control_cycles;
    j["session_control_failures"] = r.session_control_failures;
    j["wall_clock_s"] = number12(r.wall_clock_s);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  const json doc = json::parse(text);
  ExperimentReport report;
  for (const auto& j : doc) {
    RunResult r;
    r.spec = run_from_json(j);
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    r.pdet_analytic = read_number(j.at("pdet_analytic"));
    r.pdet_empirical = read_number(j.at("pdet_empirical"));
    r.ci_low = read_number(j.at("ci_low"));
    r.ci_high = read_number(j.at("ci_high"));
    r.control_trials = j.at("control_trials").get<std::size_t>();
    r.control_failures = j.at("control_failures").get<std::size_t>();
    r.message_cycles = j.at("message_cycles").get<std::size_t>();
    r.eve_mu_accuracy = read_number(j.at("eve_mu_accuracy"));
    r.eve_nu_accuracy = read_number(j.at("eve_nu_accuracy"));
    r.message_integrity = read_number(j.at("message_integrity"));
    r.session_control_cycles = j.at("session_control_cycles").get<std::size_t>();
    r.session_control_failures = j.at("session_control_failures").get<std::size_t>();
    r.wall_clock_s = read_number(j.at("wall_clock_s"));
    report.runs.push_back(std::move(r));
  }
  return report;
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : report.runs) {
    const RunSpec& s = r.spec;
    out << csv_quote(s.attack) << ',' << csv_quote(s.control) << ',' << s.dim << ',' << csv_quote(s.kind) << ',' << s.cycles
        << ',' << csv_number(s.control_prob) << ',' << s.trials << ',' << s.seed << ',' << csv_quote(r.error.value_or(""))
        << ',' << csv_number(r.pdet_analytic) << ',' << csv_number(r.pdet_empirical) << ',' << csv_number(r.ci_low) << ','
        << csv_number(r.ci_high) << ',' << r.control_trials << ',' << r.control_failures << ',' << r.message_cycles << ','
        << csv_number(r.eve_mu_accuracy) << ',' << csv_number(r.eve_nu_accuracy) << ',' << csv_number(r.message_integrity)
        << ',' << r.session_control_cycles << ',' << r.session_control_failures << ',' << csv_number(r.wall_clock_s) << "\n";
  }
  return out.str();
}

std::string render(const ExperimentReport& report, ReportFormat format) {
  return format == ReportFormat::json ? to_json(report) : to_csv(report);
}

void emit(const ExperimentReport& report, ReportFormat format, const std::string& path) {
  const std::string text = render(report, format);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed writing report to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing report to '" + path + "'");
}

}  // namespace pingpong
