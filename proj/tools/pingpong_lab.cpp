// Experiment runner for the ping-pong protocol simulator.
//
//   pingpong_lab --spec sweep.json --output report.json
//   pingpong_lab --attack cnot --control two-basis --trials 100000 --format csv

#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "pingpong/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ping-pong quantum direct communication: attack x control experiment runner"};

  std::string spec_path;
  pingpong::RunSpec single;
  std::string output = "-";
  std::string format = "json";
  unsigned jobs = 1;

  auto* spec_opt = app.add_option("--spec", spec_path, "JSON experiment spec (list of runs)")->check(CLI::ExistingFile);

  auto* group = app.add_option_group("single run", "Describe one run on the command line");
  std::vector<CLI::Option*> single_opts{
      group->add_option("--attack", single.attack, "none | intercept-resend | cnot | pavicic | qudit-shift | generic:<file> | generic:random")
          ->capture_default_str(),
      group->add_option("--control", single.control, "computational | two-basis")->capture_default_str(),
      group->add_option("--dim", single.dim, "Qudit dimension D")->capture_default_str(),
      group->add_option("--kind", single.kind, "Initial pair: qubit (singlet, D=2) | qudit (beta00)")->capture_default_str(),
      group->add_option("--cycles", single.cycles, "Protocol cycles in the session run")->capture_default_str(),
      group->add_option("--control-prob", single.control_prob, "Probability of a control cycle")->capture_default_str(),
      group->add_option("--trials", single.trials, "Control trials for the p_det estimate")->capture_default_str(),
      group->add_option("--seed", single.seed, "Random seed")->capture_default_str(),
  };
  for (auto* o : single_opts) o->excludes(spec_opt);

  app.add_option("--output", output, "Report path, '-' for stdout")->capture_default_str();
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--jobs", jobs, "Parallel runs")->check(CLI::Range(1u, 1024u))->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    pingpong::ExperimentSpec spec;
    if (!spec_path.empty()) {
      spec = pingpong::load_spec_file(spec_path);
    } else {
      spec.runs.push_back(single);
    }

    const pingpong::ExperimentReport report = pingpong::run_experiments(spec, jobs);
    pingpong::emit(report, pingpong::parse_report_format(format), output);

    if (!report.all_ok()) {
      for (std::size_t i = 0; i < report.runs.size(); ++i)
        if (report.runs[i].error) std::cerr << "run " << i << " failed: " << *report.runs[i].error << "\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
