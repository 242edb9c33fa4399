#pragma once

// Simulation configuration and its strict JSON form. Every key is optional
// on input; missing keys take the defaults below. Unknown keys and invariant
// violations are rejected with the offending key path.

#include "sdsim/errors.hpp"
#include "sdsim/rf_environment.hpp"
#include "sdsim/sd_device.hpp"
#include "sdsim/search_policies.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace sdsim {

struct SimParams {
  double dt_s = 0.1;
  double timeout_s = 1800.0;
  double beacon_interval_s = 0.5;
  // Unset means the middle of the left wall, (0, depth / 2).
  std::optional<Point> visitor_entrance;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct IdParams {
  TagId visitor_id = TagId::parse("100000001");
  TagId visitee_id = TagId::parse("100000002");

  friend bool operator==(const IdParams&, const IdParams&) = default;
};

struct Config {
  Hall hall;
  PropagationParams propagation;
  AntennaPattern antenna;
  AcousticParams acoustic;
  PolicyParams policy;
  SimParams sim;
  IdParams ids;

  Point entrance() const;
  /// Throws ConfigError listing every violated invariant.
  void validate() const;

  friend bool operator==(const Config&, const Config&) = default;
};

nlohmann::ordered_json to_json(const Config& cfg);

/// Canonical text form: two-space indented JSON plus a trailing newline.
/// The shipped config/defaults.json is exactly config_to_text(Config{}).
std::string config_to_text(const Config& cfg);

Config parse_config_text(std::string_view text);
Config parse_config(const std::filesystem::path& path);

/// Hex FNV-1a digest of the canonical compact JSON.
std::string config_digest(const Config& cfg);

/// Sets one numeric parameter. `key` is a dotted path such as
/// "propagation.shadowing_sigma_db" or an unambiguous leaf name.
Config with_param(const Config& cfg, std::string_view key, double value);

/// Contents of the shipped paper-replication.json, compiled in.
std::string_view paper_replication_config_text();
Config paper_replication_config();

}  // namespace sdsim
