#include "sdsim/cli.hpp"

#include "sdsim/experiment.hpp"
#include "sdsim/plotdata.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace sdsim::cli {

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string fmt(double v) { return fmt(std::optional<double>(v)); }

void print_batch(std::ostream& out, const BatchResult& b) {
  char buf[200];
  auto one = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char s[32];
    std::snprintf(s, sizeof s, "%.1f", *v);
    return std::string(s);
  };
  std::snprintf(buf, sizeof buf, "%-9s n=%-5d contact=%5.1f%%  mean=%8s s  std=%8s s  min=%8s s  max=%8s s\n",
                to_string(b.condition), b.stats.n, 100.0 * b.stats.contact_rate, one(b.stats.mean_s).c_str(),
                one(b.stats.std_s).c_str(), one(b.stats.min_s).c_str(), one(b.stats.max_s).c_str());
  out << buf;
}

void emit(const std::optional<std::filesystem::path>& path, const std::string& text, std::ostream& out) {
  if (path) {
    write_text_file(*path, text);
  } else {
    out << text;
  }
}

}  // namespace

Config resolve_config(const GlobalOptions& g, const Config& fallback) {
  if (g.config) return parse_config(*g.config);
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) return parse_config(env);
  return fallback;
}

int cmd_run(const GlobalOptions& g, Condition condition, int n, const std::optional<std::filesystem::path>& events_path,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (n < 1) throw ConfigError("-n: trial count must be >= 1");
    const Config cfg = resolve_config(g, Config{});
    const BatchResult batch = run_batch(cfg, condition, n, g.seed, g.jobs);

    const std::filesystem::path csv = g.out.value_or("sd_sim_run.csv");
    std::filesystem::path json = csv;
    json.replace_extension(".json");
    export_batch(batch, cfg, g.seed, ReportFormat::Csv, csv);
    export_batch(batch, cfg, g.seed, ReportFormat::Json, json);

    if (events_path) {
      const TrialRun first = run_trial(cfg, trial_seed(g.seed, condition, 0), condition);
      std::string lines;
      for (const auto& e : first.events) lines += to_json_line(e) + "\n";
      write_text_file(*events_path, lines);
    }

    print_batch(out, batch);
    out << "wrote " << csv.string() << " and " << json.string() << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_replicate(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Config cfg = resolve_config(g, paper_replication_config());
    const std::filesystem::path dir = g.out.value_or("replication");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());

    const ComparisonReport report = replicate_paper(cfg, g.seed, g.jobs);
    export_report(report, ReportFormat::Csv, dir / "replication.csv");
    export_report(report, ReportFormat::Json, dir / "replication.json");

    out << format_report_table(report);
    if (!within_bands(report)) {
      err << "replication outside calibration bands\n";
      return static_cast<int>(kBandsViolated);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const GlobalOptions& g, const std::string& param_key, const std::vector<double>& values, int n,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (n < 1) throw ConfigError("-n: trial count must be >= 1");
    if (values.empty()) throw ConfigError("--values: at least one value required");
    const Config base = resolve_config(g, Config{});

    std::string csv = "param,value,condition,n,contacts,contact_rate,mean_s,std_s\n";
    for (double value : values) {
      const Config cfg = with_param(base, param_key, value);
      for (Condition c : {Condition::SD, Condition::Acoustic}) {
        const BatchStats s = run_batch(cfg, c, n, g.seed, g.jobs).stats;
        csv += param_key + "," + fmt(value) + "," + to_string(c) + "," + std::to_string(s.n) + "," +
               std::to_string(s.contacts) + "," + fmt(s.contact_rate) + "," + fmt(s.mean_s) + "," + fmt(s.std_s) +
               "\n";
      }
    }
    emit(g.out, csv, out);
    return static_cast<int>(kOk);
  });
}

int cmd_plotdata(const std::filesystem::path& log_path, const std::optional<std::filesystem::path>& out_path,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string log = read_text_file(log_path);
    std::string csv;
    try {
      csv = plotdata_csv(log);
    } catch (const LogFormatError& e) {
      err << "error: " << log_path.string() << ": " << e.what() << "\n";
      return static_cast<int>(kConfigError);
    }
    emit(out_path, csv, out);
    return static_cast<int>(kOk);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smart Director rendezvous simulator", "sd_sim"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::string config_path;
  std::string out_path;
  app.add_option("--config", config_path, "Config JSON (falls back to $SD_SIM_CONFIG)");
  app.add_option("--seed", g.seed, "Base seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", out_path, "Output path (file or directory, per subcommand)");

  auto* run = app.add_subcommand("run", "Run a batch of trials for one condition");
  std::string condition = "sd";
  int n = 16;
  std::string events_path;
  run->add_option("--condition", condition, "sd or acoustic")
      ->check(CLI::IsMember({"sd", "acoustic"}))
      ->capture_default_str();
  run->add_option("-n,--trials", n, "Number of trials")->capture_default_str();
  run->add_option("--events", events_path, "Write the first trial's event log (JSON lines)");

  auto* replicate = app.add_subcommand("replicate", "Replicate the two 16-trial hall experiments");

  auto* sweep = app.add_subcommand("sweep", "Re-run both conditions across a parameter grid");
  std::string param_key;
  std::vector<double> values;
  int sweep_n = 16;
  sweep->add_option("--param", param_key, "Parameter key, e.g. propagation.shadowing_sigma_db")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("-n,--trials", sweep_n, "Trials per (value, condition)")->capture_default_str();

  auto* plotdata = app.add_subcommand("plotdata", "Convert a JSON-lines event log into plot CSV");
  std::string log_path;
  plotdata->add_option("log", log_path, "Event log path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kConfigError;
  }

  if (!config_path.empty()) g.config = config_path;
  if (!out_path.empty()) g.out = out_path;

  if (run->parsed()) {
    const std::optional<std::filesystem::path> events =
        events_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(events_path);
    return cmd_run(g, *parse_condition(condition), n, events, out, err);
  }
  if (replicate->parsed()) return cmd_replicate(g, out, err);
  if (sweep->parsed()) return cmd_sweep(g, param_key, values, sweep_n, out, err);
  if (plotdata->parsed()) return cmd_plotdata(log_path, g.out, out, err);
  return kConfigError;
}

}  // namespace sdsim::cli
