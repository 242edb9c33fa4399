#include "sdsim/experiment.hpp"

#include "sdsim/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace sdsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kCsvHeader = "condition,trial,seed,status,time_s,scans,path_m";

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> optional_from(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

ordered_json trials_json(const std::vector<TrialResult>& trials) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : trials) arr.push_back(to_json(t));
  return arr;
}

std::vector<TrialResult> trials_from(const json& arr) {
  std::vector<TrialResult> out;
  for (const auto& t : arr) out.push_back(trial_result_from_json(t));
  return out;
}

template <typename T>
T parse_number(std::string_view field, int line, const char* column) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("CSV line " + std::to_string(line) + ": bad " + column + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

const std::vector<ParameterBound>& calibration_bounds() {
  static const std::vector<ParameterBound> kBounds = {
      {"propagation.path_loss_exponent", 1.6, 3.5},
      {"propagation.shadowing_sigma_db", 0.0, 8.0},
      {"antenna.beamwidth_deg", 30.0, 120.0},
      {"acoustic.call_level_db", 70.0, 88.0},  // raised voice .. above a shout
      {"acoustic.ambient_level_db", 65.0, 65.0},
      {"acoustic.detection_margin_db", 0.0, 6.0},
      {"acoustic.bearing_error_sigma_deg", 10.0, 45.0},
      {"policy.n_bearings", 8.0, 24.0},
      {"policy.scan_duration_s", 10.0, 30.0},
      {"policy.walk_speed_mps", 0.5, 1.4},
      {"policy.leg_length_m", 2.0, 8.0},
      {"policy.contact_radius_m", 0.5, 1.5},
      {"policy.call_period_s", 5.0, 20.0},
      {"sim.timeout_s", 1800.0, 1800.0},
  };
  return kBounds;
}

std::vector<std::string> calibration_bound_violations(const Config& cfg) {
  std::vector<std::string> out;
  const auto j = to_json(cfg);
  for (const auto& b : calibration_bounds()) {
    const auto dot = b.key.find('.');
    const double v = j.at(b.key.substr(0, dot)).at(b.key.substr(dot + 1)).get<double>();
    if (v < b.min || v > b.max) {
      out.push_back(b.key + " = " + fmt_double(v) + " outside [" + fmt_double(b.min) + ", " + fmt_double(b.max) + "]");
    }
  }
  if (std::abs(cfg.hall.area() - 500.0) / 500.0 > 1e-9) out.push_back("hall area is not 500 m^2");
  const double range = detection_range(cfg.propagation);
  if (range < 49.9 || range > 50.3) out.push_back("zero-noise detection range " + fmt_double(range) + " m outside [49.9, 50.3]");
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, Condition condition, int trial_index) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(condition) + 1, static_cast<std::uint64_t>(trial_index)});
}

BatchStats summarize(std::span<const TrialResult> results) {
  BatchStats s;
  s.n = static_cast<int>(results.size());
  std::vector<double> times;
  for (const auto& r : results) {
    if (r.status == Status::Contact && r.time_to_contact_s) times.push_back(*r.time_to_contact_s);
  }
  s.contacts = static_cast<int>(times.size());
  s.contact_rate = s.n == 0 ? 0.0 : static_cast<double>(s.contacts) / s.n;
  if (times.empty()) return s;

  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
  double ss = 0.0;
  for (double t : times) ss += (t - mean) * (t - mean);
  s.mean_s = mean;
  s.std_s = times.size() > 1 ? std::sqrt(ss / static_cast<double>(times.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  s.min_s = *lo;
  s.max_s = *hi;
  return s;
}

BatchResult run_batch(const Config& cfg, Condition condition, int n, std::uint64_t base_seed, int jobs) {
  if (n < 1) throw std::invalid_argument("batch size must be >= 1");
  cfg.validate();

  BatchResult batch;
  batch.condition = condition;
  batch.trials.resize(static_cast<std::size_t>(n));

  auto run_one = [&](int i) {
    batch.trials[static_cast<std::size_t>(i)] =
        run_trial(cfg, trial_seed(base_seed, condition, i), condition, false).result;
  };

  int workers = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (int i = next++; i < n; i = next++) {
            try {
              run_one(i);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  batch.stats = summarize(batch.trials);
  return batch;
}

double mean_time(std::span<const TrialResult> results) {
  const BatchStats s = summarize(results);
  if (!s.mean_s) throw EmptySampleError();
  return *s.mean_s;
}

double percent_reduction(double t_new_s, double t_base_s) {
  if (!(t_base_s > 0.0) || !std::isfinite(t_base_s)) {
    throw std::invalid_argument("percent_reduction: baseline time must be > 0");
  }
  if (!(t_new_s >= 0.0)) throw std::invalid_argument("percent_reduction: new time must be >= 0");
  return 100.0 * (1.0 - t_new_s / t_base_s);
}

ComparisonReport replicate_paper(const Config& cfg, std::uint64_t base_seed, int jobs, int trials_per_condition) {
  const BatchResult sd = run_batch(cfg, Condition::SD, trials_per_condition, base_seed, jobs);
  const BatchResult ac = run_batch(cfg, Condition::Acoustic, trials_per_condition, base_seed, jobs);
  ComparisonReport report;
  report.sd = sd.stats;
  report.acoustic = ac.stats;
  if (sd.stats.mean_s && ac.stats.mean_s) report.reduction_pct = percent_reduction(*sd.stats.mean_s, *ac.stats.mean_s);
  report.config_digest = config_digest(cfg);
  report.base_seed = base_seed;
  report.sd_trials = sd.trials;
  report.acoustic_trials = ac.trials;
  return report;
}

bool within_bands(const ComparisonReport& r, const ReplicationBands& b) {
  if (!r.sd.mean_s || !r.acoustic.mean_s || !r.reduction_pct) return false;
  return *r.sd.mean_s >= b.sd_min_s && *r.sd.mean_s <= b.sd_max_s && *r.acoustic.mean_s >= b.acoustic_min_s &&
         *r.acoustic.mean_s <= b.acoustic_max_s && *r.reduction_pct >= b.reduction_min_pct &&
         *r.reduction_pct <= b.reduction_max_pct;
}

ordered_json to_json(const BatchStats& s) {
  return {
      {"n", s.n},
      {"contacts", s.contacts},
      {"mean_s", optional_number(s.mean_s)},
      {"std_s", optional_number(s.std_s)},
      {"min_s", optional_number(s.min_s)},
      {"max_s", optional_number(s.max_s)},
      {"contact_rate", s.contact_rate},
  };
}

BatchStats batch_stats_from_json(const json& j) {
  BatchStats s;
  s.n = j.at("n").get<int>();
  s.contacts = j.at("contacts").get<int>();
  s.mean_s = optional_from(j, "mean_s");
  s.std_s = optional_from(j, "std_s");
  s.min_s = optional_from(j, "min_s");
  s.max_s = optional_from(j, "max_s");
  s.contact_rate = j.at("contact_rate").get<double>();
  return s;
}

ordered_json to_json(const ComparisonReport& r) {
  return {
      {"base_seed", r.base_seed},
      {"config_digest", r.config_digest},
      {"reduction_pct", optional_number(r.reduction_pct)},
      {"sd", to_json(r.sd)},
      {"acoustic", to_json(r.acoustic)},
      {"sd_trials", trials_json(r.sd_trials)},
      {"acoustic_trials", trials_json(r.acoustic_trials)},
  };
}

ComparisonReport comparison_report_from_json(const json& j) {
  ComparisonReport r;
  r.base_seed = j.at("base_seed").get<std::uint64_t>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.reduction_pct = optional_from(j, "reduction_pct");
  r.sd = batch_stats_from_json(j.at("sd"));
  r.acoustic = batch_stats_from_json(j.at("acoustic"));
  r.sd_trials = trials_from(j.at("sd_trials"));
  r.acoustic_trials = trials_from(j.at("acoustic_trials"));
  return r;
}

std::string trials_csv(std::span<const CsvTrialRow> rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : rows) {
    const TrialResult& r = row.result;
    out += std::string(to_string(row.condition)) + "," + std::to_string(row.trial) + "," + std::to_string(r.seed) +
           "," + to_string(r.status) + "," + (r.time_to_contact_s ? fmt_double(*r.time_to_contact_s) : "") + "," +
           std::to_string(r.scans) + "," + fmt_double(r.path_length_m) + "\n";
  }
  return out;
}

std::vector<CsvTrialRow> parse_trials_csv(std::string_view text) {
  std::vector<CsvTrialRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != kCsvHeader) throw std::invalid_argument("CSV line 1: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected 7 fields");

    CsvTrialRow row;
    const auto cond = parse_condition(f[0]);
    const auto status = parse_status(f[3]);
    if (!cond || !status) throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": bad enum value");
    row.condition = *cond;
    row.trial = parse_number<int>(f[1], lineno, "trial");
    row.result.seed = parse_number<std::uint64_t>(f[2], lineno, "seed");
    row.result.status = *status;
    if (!f[4].empty()) row.result.time_to_contact_s = parse_number<double>(f[4], lineno, "time_s");
    row.result.scans = parse_number<int>(f[5], lineno, "scans");
    row.result.path_length_m = parse_number<double>(f[6], lineno, "path_m");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvTrialRow> csv_rows(const ComparisonReport& r) {
  std::vector<CsvTrialRow> rows;
  for (std::size_t i = 0; i < r.sd_trials.size(); ++i) rows.push_back({Condition::SD, static_cast<int>(i), r.sd_trials[i]});
  for (std::size_t i = 0; i < r.acoustic_trials.size(); ++i) {
    rows.push_back({Condition::Acoustic, static_cast<int>(i), r.acoustic_trials[i]});
  }
  return rows;
}

std::vector<CsvTrialRow> csv_rows(const BatchResult& b) {
  std::vector<CsvTrialRow> rows;
  for (std::size_t i = 0; i < b.trials.size(); ++i) rows.push_back({b.condition, static_cast<int>(i), b.trials[i]});
  return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void export_report(const ComparisonReport& report, ReportFormat format, const std::filesystem::path& path) {
  if (format == ReportFormat::Csv) {
    write_text_file(path, trials_csv(csv_rows(report)));
  } else {
    write_text_file(path, to_json(report).dump(2) + "\n");
  }
}

void export_batch(const BatchResult& batch, const Config& cfg, std::uint64_t base_seed, ReportFormat format,
                  const std::filesystem::path& path) {
  if (format == ReportFormat::Csv) {
    write_text_file(path, trials_csv(csv_rows(batch)));
    return;
  }
  const ordered_json j = {
      {"condition", to_string(batch.condition)},
      {"base_seed", base_seed},
      {"config_digest", config_digest(cfg)},
      {"stats", to_json(batch.stats)},
      {"trials", trials_json(batch.trials)},
  };
  write_text_file(path, j.dump(2) + "\n");
}

ComparisonReport load_report_json(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return comparison_report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw IoError(path.string(), std::string("malformed report: ") + e.what());
  }
}

std::string format_report_table(const ComparisonReport& r, const ReplicationBands& b) {
  auto row = [](const char* metric, const std::string& sim, double observed, double lo, double hi, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %12s %10.1f   [%6.1f, %6.1f]  %s\n", metric, sim.c_str(), observed, lo, hi,
                  ok ? "ok" : "OUT");
    return std::string(buf);
  };
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", *v);
    return std::string(buf);
  };
  auto in = [](const std::optional<double>& v, double lo, double hi) { return v && *v >= lo && *v <= hi; };

  std::string out;
  char head[160];
  std::snprintf(head, sizeof head, "%-22s %12s %10s   %-16s  %s\n", "metric", "simulated", "observed", "band", "");
  out += head;
  out += row("sd mean (s)", num(r.sd.mean_s), PaperTargets::kSdMeanS, b.sd_min_s, b.sd_max_s,
             in(r.sd.mean_s, b.sd_min_s, b.sd_max_s));
  out += row("acoustic mean (s)", num(r.acoustic.mean_s), PaperTargets::kAcousticMeanS, b.acoustic_min_s,
             b.acoustic_max_s, in(r.acoustic.mean_s, b.acoustic_min_s, b.acoustic_max_s));
  out += row("reduction (%)", num(r.reduction_pct), PaperTargets::kReductionPct, b.reduction_min_pct,
             b.reduction_max_pct, in(r.reduction_pct, b.reduction_min_pct, b.reduction_max_pct));
  char tail[200];
  std::snprintf(tail, sizeof tail, "trials: sd %d (contact %.0f%%, std %s s), acoustic %d (contact %.0f%%, std %s s)\n",
                r.sd.n, 100.0 * r.sd.contact_rate, num(r.sd.std_s).c_str(), r.acoustic.n,
                100.0 * r.acoustic.contact_rate, num(r.acoustic.std_s).c_str());
  out += tail;
  out += "base seed " + std::to_string(r.base_seed) + ", config digest " + r.config_digest + "\n";
  return out;
}

}  // namespace sdsim
