#include "sdsim/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace sdsim;

namespace {

TrialResult contact_at(double t) {
  TrialResult r;
  r.status = Status::Contact;
  r.time_to_contact_s = t;
  return r;
}

TrialResult timed_out() {
  TrialResult r;
  r.status = Status::Timeout;
  return r;
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / ("sdsim_test_experiment_" + std::string(name));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("mean_time") {
  const std::vector<TrialResult> one{contact_at(86)};
  CHECK(mean_time(one) == 86.0);
  const std::vector<TrialResult> two{contact_at(80), contact_at(92)};
  CHECK(mean_time(two) == 86.0);
  const std::vector<TrialResult> sixteen(16, contact_at(86));
  CHECK(mean_time(sixteen) == 86.0);
  const std::vector<TrialResult> mixed{contact_at(80), timed_out(), contact_at(92)};
  CHECK(mean_time(mixed) == 86.0);
  const std::vector<TrialResult> none{timed_out()};
  CHECK_THROWS_AS(mean_time(none), EmptySampleError);
  CHECK_THROWS_AS(mean_time(std::vector<TrialResult>{}), EmptySampleError);
}

TEST_CASE("percent_reduction") {
  CHECK(percent_reduction(86, 340) == doctest::Approx(74.70588235294117).epsilon(1e-12));
  CHECK(std::fabs(percent_reduction(86, 340) - 74.71) <= 0.01);
  CHECK(percent_reduction(340, 340) == 0.0);
  CHECK(percent_reduction(0, 340) == 100.0);
  CHECK_THROWS_AS(percent_reduction(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(percent_reduction(10, -1), std::invalid_argument);
}

TEST_CASE("summarize") {
  const std::vector<TrialResult> rs{contact_at(10), contact_at(20), contact_at(30), timed_out()};
  const BatchStats s = summarize(rs);
  CHECK(s.n == 4);
  CHECK(s.contacts == 3);
  CHECK(s.contact_rate == 0.75);
  CHECK(*s.mean_s == 20.0);
  CHECK(*s.std_s == 10.0);
  CHECK(*s.min_s == 10.0);
  CHECK(*s.max_s == 30.0);

  const BatchStats empty = summarize(std::vector<TrialResult>{timed_out()});
  CHECK_FALSE(empty.mean_s);
  CHECK(empty.contact_rate == 0.0);
}

TEST_CASE("run_batch") {
  const Config cfg;
  CHECK(run_batch(cfg, Condition::SD, 16, 5) == run_batch(cfg, Condition::SD, 16, 5));

  const BatchResult single = run_batch(cfg, Condition::Acoustic, 1, 5);
  REQUIRE(single.stats.contacts == 1);
  CHECK(*single.stats.mean_s == *single.trials[0].time_to_contact_s);
  CHECK(*single.stats.std_s == 0.0);

  CHECK(run_batch(cfg, Condition::Acoustic, 40, 8, 1) == run_batch(cfg, Condition::Acoustic, 40, 8, 4));
  CHECK(run_batch(cfg, Condition::SD, 200, 3, 0).stats.contact_rate == 1.0);

  CHECK_THROWS(run_batch(cfg, Condition::SD, 0, 1));
}

TEST_CASE("trial seeds differ across conditions and indices") {
  CHECK(trial_seed(1, Condition::SD, 0) != trial_seed(1, Condition::Acoustic, 0));
  CHECK(trial_seed(1, Condition::SD, 0) != trial_seed(1, Condition::SD, 1));
  CHECK(trial_seed(1, Condition::SD, 0) != trial_seed(2, Condition::SD, 0));
  CHECK(trial_seed(1, Condition::SD, 3) == trial_seed(1, Condition::SD, 3));
}

TEST_CASE("replicate_paper") {
  const Config cfg = paper_replication_config();
  const ComparisonReport a = replicate_paper(cfg, 1, 2);
  CHECK(a == replicate_paper(cfg, 1, 1));
  CHECK(a.sd_trials.size() == 16);
  CHECK(a.acoustic_trials.size() == 16);
  CHECK(a.config_digest == config_digest(cfg));
  REQUIRE(a.reduction_pct);

  // Recompute the reduction from the trial lists.
  double sd = 0.0, ac = 0.0;
  int nsd = 0, nac = 0;
  for (const auto& t : a.sd_trials) {
    if (t.time_to_contact_s) sd += *t.time_to_contact_s, ++nsd;
  }
  for (const auto& t : a.acoustic_trials) {
    if (t.time_to_contact_s) ac += *t.time_to_contact_s, ++nac;
  }
  sd /= nsd;
  ac /= nac;
  CHECK(*a.reduction_pct == doctest::Approx(100.0 * (ac - sd) / ac).epsilon(1e-12));
  CHECK(within_bands(a));
}

TEST_CASE("a call audible across the whole hall erases most of the advantage") {
  Config cfg;
  cfg.acoustic.call_level_db_at_1m = 100.0;  // audible out to ~178 m
  REQUIRE(audible_range(cfg.acoustic.call_level_db_at_1m, cfg.acoustic) >= cfg.hall.diagonal());
  const ComparisonReport r = replicate_paper(cfg, 1, 0, 500);
  REQUIRE(r.reduction_pct);
  CHECK(std::fabs(*r.reduction_pct) < 30.0);
}

TEST_CASE("exports") {
  const ComparisonReport report = replicate_paper(paper_replication_config(), 1, 2);
  const auto dir = scratch_dir("exports");

  SUBCASE("csv has one row per trial and round-trips") {
    export_report(report, ReportFormat::Csv, dir / "r.csv");
    const std::string text = read_text_file(dir / "r.csv");
    CHECK(text.rfind("condition,trial,seed,status,time_s,scans,path_m\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 33);
    const auto rows = parse_trials_csv(text);
    const auto expected = csv_rows(report);
    REQUIRE(rows.size() == 32);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].condition == expected[i].condition);
      CHECK(rows[i].trial == expected[i].trial);
      CHECK(rows[i].result.seed == expected[i].result.seed);
      CHECK(rows[i].result.status == expected[i].result.status);
      CHECK(rows[i].result.time_to_contact_s == expected[i].result.time_to_contact_s);
      CHECK(rows[i].result.scans == expected[i].result.scans);
      CHECK(rows[i].result.path_length_m == expected[i].result.path_length_m);
    }
  }
  SUBCASE("json round-trips") {
    export_report(report, ReportFormat::Json, dir / "r.json");
    CHECK(load_report_json(dir / "r.json") == report);
  }
  SUBCASE("unwritable path names the path") {
    const auto bad = dir / "missing" / "sub" / "r.csv";
    try {
      export_report(report, ReportFormat::Csv, bad);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.path() == bad.string());
      CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("report table") {
  const ComparisonReport report = replicate_paper(paper_replication_config(), 1, 2);
  const std::string table = format_report_table(report);
  CHECK(table.find("86") != std::string::npos);
  CHECK(table.find("340") != std::string::npos);
  CHECK(table.find("OUT") == std::string::npos);
}

TEST_CASE("calibration bounds") {
  CHECK(calibration_bound_violations(paper_replication_config()).empty());
  Config cfg = paper_replication_config();
  cfg.acoustic.call_level_db_at_1m = 95.0;
  cfg.hall.width = 30.0;
  CHECK(calibration_bound_violations(cfg).size() == 2);
}
