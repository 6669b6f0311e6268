#include "pingpong/experiment.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace pingpong;

namespace {

RunSpec small_run(std::string attack, std::string control, std::size_t dim, std::string kind, std::uint64_t seed) {
  RunSpec r;
  r.attack = std::move(attack);
  r.control = std::move(control);
  r.dim = dim;
  r.kind = std::move(kind);
  r.cycles = 300;
  r.trials = 2000;
  r.seed = seed;
  return r;
}

void strip_timing(ExperimentReport& r) {
  for (auto& run : r.runs) run.wall_clock_s = 0.0;
}

}  // namespace

TEST(Spec, DefaultsAndBothShapes) {
  const auto a = parse_spec_json(R"({"runs": [{"attack": "cnot", "control": "two-basis"}]})");
  ASSERT_EQ(a.runs.size(), 1u);
  EXPECT_EQ(a.runs[0].attack, "cnot");
  EXPECT_EQ(a.runs[0].dim, 2u);
  EXPECT_EQ(a.runs[0].seed, 1u);
  const auto b = parse_spec_json(R"([{"attack": "qudit-shift", "dim": 3, "kind": "qudit"}])");
  EXPECT_EQ(b.runs[0].dim, 3u);
  EXPECT_THROW(parse_spec_json("{\"runs\": 3"), nlohmann::json::exception);
}

TEST(Report, EmptySpecGivesEmptyOutputs) {
  const auto rep = run_experiments(parse_spec_json(R"({"runs": []})"));
  EXPECT_TRUE(rep.runs.empty());
  EXPECT_TRUE(rep.all_ok());
  EXPECT_EQ(nlohmann::json::parse(to_json(rep)), nlohmann::json::array());
  const auto csv = to_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(csv.rfind("attack,", 0), 0u);
}

TEST(Report, TwoRunsInSpecOrder) {
  ExperimentSpec spec;
  spec.runs.push_back(small_run("cnot", "two-basis", 2, "qubit", 5));
  spec.runs.push_back(small_run("intercept-resend", "computational", 3, "qudit", 6));
  const auto rep = run_experiments(spec, 2);
  ASSERT_EQ(rep.runs.size(), 2u);
  EXPECT_TRUE(rep.all_ok());
  EXPECT_EQ(rep.runs[0].spec.attack, "cnot");
  EXPECT_NEAR(rep.runs[0].pdet_analytic, 0.25, 1e-12);
  EXPECT_NEAR(rep.runs[1].pdet_analytic, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(rep.runs[0].control_trials, 2000u);
  EXPECT_LE(rep.runs[0].ci_low, rep.runs[0].pdet_empirical);
  EXPECT_GE(rep.runs[0].ci_high, rep.runs[0].pdet_empirical);

  const auto csv = to_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Report, JsonRoundTrip) {
  ExperimentSpec spec;
  spec.runs.push_back(small_run("pavicic", "two-basis", 2, "qubit", 11));
  auto rep = run_experiments(spec);
  const auto back = report_from_json(to_json(rep));
  ASSERT_EQ(back.runs.size(), 1u);
  EXPECT_EQ(back.runs[0].spec, rep.runs[0].spec);
  EXPECT_EQ(back.runs[0].control_failures, rep.runs[0].control_failures);
  EXPECT_NEAR(back.runs[0].pdet_empirical, rep.runs[0].pdet_empirical, 1e-11);
  EXPECT_EQ(to_json(back), to_json(report_from_json(to_json(back))));
}

TEST(Report, ReplayIsDeterministic) {
  ExperimentSpec spec;
  spec.runs.push_back(small_run("generic:random", "computational", 3, "qudit", 21));
  spec.runs.push_back(small_run("qudit-shift", "computational", 4, "qudit", 22));
  auto a = run_experiments(spec, 1);
  auto b = run_experiments(spec, 3);
  strip_timing(a);
  strip_timing(b);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(Report, BadRunIsRecordedNotFatal) {
  ExperimentSpec spec;
  spec.runs.push_back(small_run("cnot", "computational", 3, "qudit", 1));
  spec.runs.push_back(small_run("none", "computational", 2, "qubit", 1));
  const auto rep = run_experiments(spec);
  ASSERT_EQ(rep.runs.size(), 2u);
  EXPECT_FALSE(rep.all_ok());
  EXPECT_TRUE(rep.runs[0].error.has_value());
  EXPECT_FALSE(rep.runs[1].error.has_value());
  const auto j = nlohmann::json::parse(to_json(rep));
  EXPECT_TRUE(j[0]["pdet_empirical"].is_null());
  EXPECT_TRUE(j[0]["error"].is_string());
}

TEST(Report, NoMessageCyclesGivesNullRates) {
  ExperimentSpec spec;
  auto r = small_run("none", "computational", 2, "qubit", 1);
  r.control_prob = 1.0;
  spec.runs.push_back(r);
  const auto rep = run_experiments(spec);
  EXPECT_TRUE(std::isnan(rep.runs[0].message_integrity));
  const auto j = nlohmann::json::parse(to_json(rep));
  EXPECT_TRUE(j[0]["message_integrity"].is_null());
}

TEST(Format, Parse) {
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
  EXPECT_THROW(parse_report_format("xml"), std::invalid_argument);
}
