#pragma once

// Monte Carlo batches over independent trial seeds, summary statistics and
// the two-condition comparison (SD scan-and-walk vs. acoustic name calling).

#include "sdsim/config.hpp"
#include "sdsim/sim_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdsim {

/// Observed means from the two 16-trial hall experiments and the reported
/// reduction.
struct PaperTargets {
  static constexpr int kTrialsPerCondition = 16;
  static constexpr double kSdMeanS = 86.0;
  static constexpr double kAcousticMeanS = 340.0;
  static constexpr double kReductionPct = 74.0;
};

/// Calibration bands a replication run must land in.
struct ReplicationBands {
  double sd_min_s = 69.0;
  double sd_max_s = 103.0;
  double acoustic_min_s = 255.0;
  double acoustic_max_s = 425.0;
  double reduction_min_pct = 66.0;
  double reduction_max_pct = 82.0;
};

/// Plausible range for one calibrated parameter, keyed by config path.
struct ParameterBound {
  std::string key;
  double min;
  double max;
};

/// Ranges a replication config must respect.
const std::vector<ParameterBound>& calibration_bounds();
/// One message per parameter outside its bound; also checks the hall area
/// (500 m^2) and the zero-noise detection range (49.9 to 50.3 m).
std::vector<std::string> calibration_bound_violations(const Config& cfg);

// Mean, std, min and max are over Contact trials only and are absent when no
// trial reached contact. std is the sample standard deviation (0 for n = 1).
struct BatchStats {
  int n = 0;
  int contacts = 0;
  std::optional<double> mean_s;
  std::optional<double> std_s;
  std::optional<double> min_s;
  std::optional<double> max_s;
  double contact_rate = 0.0;

  friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

struct BatchResult {
  Condition condition = Condition::SD;
  BatchStats stats;
  std::vector<TrialResult> trials;

  friend bool operator==(const BatchResult&, const BatchResult&) = default;
};

struct ComparisonReport {
  BatchStats sd;
  BatchStats acoustic;
  std::optional<double> reduction_pct;
  std::string config_digest;
  std::uint64_t base_seed = 0;
  std::vector<TrialResult> sd_trials;
  std::vector<TrialResult> acoustic_trials;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

enum class ReportFormat { Csv, Json };

/// Per-trial seed: conditions and trial indices get independent streams.
std::uint64_t trial_seed(std::uint64_t base_seed, Condition condition, int trial_index);

BatchStats summarize(std::span<const TrialResult> results);

/// `jobs` <= 0 uses the hardware concurrency. Results are independent of it.
BatchResult run_batch(const Config& cfg, Condition condition, int n, std::uint64_t base_seed, int jobs = 1);

/// Throws EmptySampleError when no result reached contact.
double mean_time(std::span<const TrialResult> results);

double percent_reduction(double t_new_s, double t_base_s);

ComparisonReport replicate_paper(const Config& cfg, std::uint64_t base_seed, int jobs = 1,
                                 int trials_per_condition = PaperTargets::kTrialsPerCondition);

bool within_bands(const ComparisonReport& report, const ReplicationBands& bands = {});

nlohmann::ordered_json to_json(const BatchStats& s);
BatchStats batch_stats_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ComparisonReport& r);
ComparisonReport comparison_report_from_json(const nlohmann::json& j);

/// One CSV row per trial; columns condition,trial,seed,status,time_s,scans,path_m.
struct CsvTrialRow {
  Condition condition = Condition::SD;
  int trial = 0;
  TrialResult result;  // event_count is not carried by the CSV
};

std::string trials_csv(std::span<const CsvTrialRow> rows);
std::vector<CsvTrialRow> parse_trials_csv(std::string_view text);
std::vector<CsvTrialRow> csv_rows(const ComparisonReport& r);
std::vector<CsvTrialRow> csv_rows(const BatchResult& b);

/// Throws IoError naming the path.
void export_report(const ComparisonReport& report, ReportFormat format, const std::filesystem::path& path);
void export_batch(const BatchResult& batch, const Config& cfg, std::uint64_t base_seed, ReportFormat format,
                  const std::filesystem::path& path);
ComparisonReport load_report_json(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

/// Aligned text table of simulated vs. observed means.
std::string format_report_table(const ComparisonReport& report, const ReplicationBands& bands = {});

}  // namespace sdsim
