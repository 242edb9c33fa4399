#include "sdsim/config.hpp"

#include "sdsim/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>

namespace sdsim {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid config";
        for (const auto& issue : issues) msg += "\n  " + issue;
        return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the last key of a dotted path, found by locating each quoted key in
// turn after the previous one. Returns 0 when the path is not in the text.
int locate_key_line(std::string_view text, std::string_view path) {
  std::size_t pos = 0;
  while (!path.empty()) {
    const auto dot = path.find('.');
    const std::string needle = "\"" + std::string(path.substr(0, dot)) + "\"";
    pos = text.find(needle, pos);
    if (pos == std::string_view::npos) return 0;
    path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
    if (!path.empty()) pos += needle.size();
  }
  return line_of_offset(text, pos);
}

std::string with_line(std::string_view text, std::string_view path, std::string issue) {
  if (const int line = locate_key_line(text, path); line > 0) {
    issue += " (line " + std::to_string(line) + ")";
  }
  return issue;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  // Returns the section object or nullptr when absent or malformed. Unknown
  // keys inside the section are reported.
  const json* section(const json& root, const std::string& name, std::span<const std::string_view> keys) {
    auto it = root.find(name);
    if (it == root.end()) return nullptr;
    if (!it->is_object()) {
      fail(name, "must be an object");
      return nullptr;
    }
    for (const auto& [key, _] : it->items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) fail(name + "." + key, "unknown key");
    }
    return &*it;
  }

  void number(const json* sec, const std::string& sec_name, const char* key, double& out) {
    const json* v = field(sec, key);
    if (!v) return;
    if (!v->is_number()) return fail(sec_name + "." + key, "must be a number");
    out = v->get<double>();
  }

  void integer(const json* sec, const std::string& sec_name, const char* key, int& out) {
    const json* v = field(sec, key);
    if (!v) return;
    if (!v->is_number_integer()) return fail(sec_name + "." + key, "must be an integer");
    out = v->get<int>();
  }

  void tag(const json* sec, const std::string& sec_name, const char* key, TagId& out) {
    const json* v = field(sec, key);
    if (!v) return;
    const std::string path = sec_name + "." + key;
    if (!v->is_string()) return fail(path, "must be a string of 9 decimal digits");
    auto id = TagId::try_parse(v->get<std::string>());
    if (!id) return fail(path, "must be exactly 9 decimal digits, got \"" + v->get<std::string>() + "\"");
    out = *id;
  }

  void point(const json* sec, const std::string& sec_name, const char* key, std::optional<Point>& out) {
    const json* v = field(sec, key);
    if (!v) return;
    const std::string path = sec_name + "." + key;
    if (v->is_null()) {
      out.reset();
      return;
    }
    if (!v->is_object()) return fail(path, "must be null or an object {\"x\", \"y\"}");
    Point p;
    bool ok = true;
    for (const auto& [k, val] : v->items()) {
      if (k != "x" && k != "y") {
        fail(path + "." + k, "unknown key");
        ok = false;
      } else if (!val.is_number()) {
        fail(path + "." + k, "must be a number");
        ok = false;
      }
    }
    if (!v->contains("x") || !v->contains("y")) {
      fail(path, "requires both x and y");
      ok = false;
    }
    if (!ok) return;
    p.x = v->at("x").get<double>();
    p.y = v->at("y").get<double>();
    out = p;
  }

  void fail(const std::string& path, const std::string& msg) {
    issues_.push_back(with_line(text_, path, path + ": " + msg));
  }

  std::vector<std::string>& issues() { return issues_; }

 private:
  static const json* field(const json* sec, const char* key) {
    if (!sec) return nullptr;
    auto it = sec->find(key);
    return it == sec->end() ? nullptr : &*it;
  }

  std::string_view text_;
  std::vector<std::string> issues_;
};

const std::vector<std::pair<std::string, std::vector<std::string_view>>>& schema() {
  static const std::vector<std::pair<std::string, std::vector<std::string_view>>> kSchema = {
      {"hall", {"width_m", "depth_m"}},
      {"propagation",
       {"ref_power_dbm", "ref_distance_m", "path_loss_exponent", "shadowing_sigma_db", "detection_threshold_dbm"}},
      {"antenna", {"beamwidth_deg", "backlobe_floor_db"}},
      {"acoustic", {"call_level_db", "ambient_level_db", "detection_margin_db", "bearing_error_sigma_deg"}},
      {"policy",
       {"n_bearings", "scan_duration_s", "walk_speed_mps", "leg_length_m", "relocate_distance_m",
        "contact_radius_m", "call_period_s"}},
      {"sim", {"dt_s", "timeout_s", "beacon_interval_s", "visitor_entrance"}},
      {"ids", {"visitor_id", "visitee_id"}},
  };
  return kSchema;
}

const json* open_section(Reader& r, const json& root, const std::string& name) {
  for (const auto& [sec, keys] : schema()) {
    if (sec == name) {
      return r.section(root, name, keys);
    }
  }
  return nullptr;
}

Config config_from_json(const json& root, std::string_view text) {
  Reader r(text);
  if (!root.is_object()) throw ConfigError("(root): config must be a JSON object");
  for (const auto& [key, _] : root.items()) {
    const bool known = std::any_of(schema().begin(), schema().end(), [&](const auto& s) { return s.first == key; });
    if (!known) r.fail(key, "unknown key");
  }

  Config cfg;
  const json* hall = open_section(r, root, "hall");
  r.number(hall, "hall", "width_m", cfg.hall.width);
  r.number(hall, "hall", "depth_m", cfg.hall.depth);

  const json* prop = open_section(r, root, "propagation");
  r.number(prop, "propagation", "ref_power_dbm", cfg.propagation.ref_power_dbm);
  r.number(prop, "propagation", "ref_distance_m", cfg.propagation.ref_distance_m);
  r.number(prop, "propagation", "path_loss_exponent", cfg.propagation.path_loss_exponent);
  r.number(prop, "propagation", "shadowing_sigma_db", cfg.propagation.shadowing_sigma_db);
  r.number(prop, "propagation", "detection_threshold_dbm", cfg.propagation.detection_threshold_dbm);

  const json* ant = open_section(r, root, "antenna");
  r.number(ant, "antenna", "beamwidth_deg", cfg.antenna.beamwidth_deg);
  r.number(ant, "antenna", "backlobe_floor_db", cfg.antenna.backlobe_floor_db);

  const json* ac = open_section(r, root, "acoustic");
  r.number(ac, "acoustic", "call_level_db", cfg.acoustic.call_level_db_at_1m);
  r.number(ac, "acoustic", "ambient_level_db", cfg.acoustic.ambient_level_db);
  r.number(ac, "acoustic", "detection_margin_db", cfg.acoustic.detection_margin_db);
  r.number(ac, "acoustic", "bearing_error_sigma_deg", cfg.acoustic.bearing_error_sigma_deg);

  const json* pol = open_section(r, root, "policy");
  r.integer(pol, "policy", "n_bearings", cfg.policy.n_bearings);
  r.number(pol, "policy", "scan_duration_s", cfg.policy.scan_duration_s);
  r.number(pol, "policy", "walk_speed_mps", cfg.policy.walk_speed_mps);
  r.number(pol, "policy", "leg_length_m", cfg.policy.leg_length_m);
  r.number(pol, "policy", "relocate_distance_m", cfg.policy.relocate_distance_m);
  r.number(pol, "policy", "contact_radius_m", cfg.policy.contact_radius_m);
  r.number(pol, "policy", "call_period_s", cfg.policy.call_period_s);

  const json* sim = open_section(r, root, "sim");
  r.number(sim, "sim", "dt_s", cfg.sim.dt_s);
  r.number(sim, "sim", "timeout_s", cfg.sim.timeout_s);
  r.number(sim, "sim", "beacon_interval_s", cfg.sim.beacon_interval_s);
  r.point(sim, "sim", "visitor_entrance", cfg.sim.visitor_entrance);

  const json* ids = open_section(r, root, "ids");
  r.tag(ids, "ids", "visitor_id", cfg.ids.visitor_id);
  r.tag(ids, "ids", "visitee_id", cfg.ids.visitee_id);

  if (!r.issues().empty()) throw ConfigError(std::move(r.issues()));

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    std::vector<std::string> located;
    for (const auto& issue : e.issues()) {
      located.push_back(with_line(text, issue.substr(0, issue.find(' ')), issue));
    }
    throw ConfigError(std::move(located));
  }
  return cfg;
}

template <typename F>
void collect(std::vector<std::string>& issues, F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    issues.emplace_back(e.what());
  }
}

}  // namespace

Point Config::entrance() const { return sim.visitor_entrance.value_or(Point{0.0, hall.depth / 2.0}); }

void Config::validate() const {
  std::vector<std::string> issues;
  collect(issues, [&] { hall.validate(); });
  collect(issues, [&] { propagation.validate(); });
  collect(issues, [&] { antenna.validate(); });
  collect(issues, [&] { acoustic.validate(); });
  collect(issues, [&] { policy.validate(); });

  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(sim.dt_s)) issues.emplace_back("sim.dt_s must be > 0");
  if (!positive(sim.timeout_s)) issues.emplace_back("sim.timeout_s must be > 0");
  if (!positive(sim.beacon_interval_s)) issues.emplace_back("sim.beacon_interval_s must be > 0");
  if (positive(sim.dt_s) && sim.dt_s > std::min(policy.scan_duration_s, policy.call_period_s)) {
    issues.emplace_back("sim.dt_s must not exceed policy.scan_duration_s or policy.call_period_s");
  }
  if (positive(sim.beacon_interval_s) && policy.n_bearings > 0 &&
      sim.beacon_interval_s > policy.scan_duration_s / policy.n_bearings) {
    issues.emplace_back("sim.beacon_interval_s must not exceed the per-bearing dwell (scan_duration_s / n_bearings)");
  }
  if (sim.visitor_entrance && !hall.contains(*sim.visitor_entrance)) {
    issues.emplace_back("sim.visitor_entrance must lie inside the hall");
  }
  if (ids.visitor_id == ids.visitee_id) issues.emplace_back("ids.visitee_id must differ from ids.visitor_id");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ordered_json to_json(const Config& cfg) {
  ordered_json j;
  j["hall"] = {{"width_m", cfg.hall.width}, {"depth_m", cfg.hall.depth}};
  j["propagation"] = {
      {"ref_power_dbm", cfg.propagation.ref_power_dbm},
      {"ref_distance_m", cfg.propagation.ref_distance_m},
      {"path_loss_exponent", cfg.propagation.path_loss_exponent},
      {"shadowing_sigma_db", cfg.propagation.shadowing_sigma_db},
      {"detection_threshold_dbm", cfg.propagation.detection_threshold_dbm},
  };
  j["antenna"] = {{"beamwidth_deg", cfg.antenna.beamwidth_deg}, {"backlobe_floor_db", cfg.antenna.backlobe_floor_db}};
  j["acoustic"] = {
      {"call_level_db", cfg.acoustic.call_level_db_at_1m},
      {"ambient_level_db", cfg.acoustic.ambient_level_db},
      {"detection_margin_db", cfg.acoustic.detection_margin_db},
      {"bearing_error_sigma_deg", cfg.acoustic.bearing_error_sigma_deg},
  };
  j["policy"] = {
      {"n_bearings", cfg.policy.n_bearings},
      {"scan_duration_s", cfg.policy.scan_duration_s},
      {"walk_speed_mps", cfg.policy.walk_speed_mps},
      {"leg_length_m", cfg.policy.leg_length_m},
      {"relocate_distance_m", cfg.policy.relocate_distance_m},
      {"contact_radius_m", cfg.policy.contact_radius_m},
      {"call_period_s", cfg.policy.call_period_s},
  };
  ordered_json entrance = nullptr;
  if (cfg.sim.visitor_entrance) entrance = {{"x", cfg.sim.visitor_entrance->x}, {"y", cfg.sim.visitor_entrance->y}};
  j["sim"] = {
      {"dt_s", cfg.sim.dt_s},
      {"timeout_s", cfg.sim.timeout_s},
      {"beacon_interval_s", cfg.sim.beacon_interval_s},
      {"visitor_entrance", entrance},
  };
  j["ids"] = {{"visitor_id", cfg.ids.visitor_id.str()}, {"visitee_id", cfg.ids.visitee_id.str()}};
  return j;
}

std::string config_to_text(const Config& cfg) { return to_json(cfg).dump(2) + "\n"; }

Config parse_config_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("(root): malformed JSON at line " + std::to_string(line) + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("(root): malformed JSON: ") + e.what());
  }
  return config_from_json(root, text);
}

Config parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return parse_config_text(text);
  } catch (const ConfigError& e) {
    std::vector<std::string> issues;
    for (const auto& issue : e.issues()) issues.push_back(path.string() + ": " + issue);
    throw ConfigError(std::move(issues));
  }
}

std::string config_digest(const Config& cfg) {
  const std::string canonical = to_json(cfg).dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.data(), canonical.size())));
  return buf;
}

Config with_param(const Config& cfg, std::string_view key, double value) {
  json j = json::parse(to_json(cfg).dump());
  std::string section;
  std::string leaf;
  if (const auto dot = key.find('.'); dot != std::string_view::npos) {
    section = std::string(key.substr(0, dot));
    leaf = std::string(key.substr(dot + 1));
  } else {
    leaf = std::string(key);
    for (const auto& [sec, keys] : schema()) {
      if (std::find(keys.begin(), keys.end(), leaf) != keys.end()) {
        if (!section.empty()) throw ConfigError(std::string(key) + ": ambiguous parameter name");
        section = sec;
      }
    }
  }
  if (section.empty() || !j.contains(section) || !j[section].contains(leaf)) {
    throw ConfigError(std::string(key) + ": unknown parameter");
  }
  json& slot = j[section][leaf];
  if (slot.is_number_integer()) {
    if (value != std::floor(value)) throw ConfigError(section + "." + leaf + ": must be an integer");
    slot = static_cast<long long>(value);
  } else if (slot.is_number()) {
    slot = value;
  } else {
    throw ConfigError(section + "." + leaf + ": not a numeric parameter");
  }
  return config_from_json(j, {});
}

Config paper_replication_config() { return parse_config_text(paper_replication_config_text()); }

}  // namespace sdsim
