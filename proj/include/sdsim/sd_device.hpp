#pragma once

// The Smart Director device programs: storing the counterpart's id,
// beaconing the device's own id, and turning matched detections into a
// vibration intensity.

#include "sdsim/rf_environment.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdsim {

/// Nine decimal digits. Construct through TagId::parse.
class TagId {
 public:
  static constexpr std::size_t kLength = 9;

  static std::optional<TagId> try_parse(std::string_view raw);
  /// Throws std::invalid_argument on a malformed id.
  static TagId parse(std::string_view raw);

  const std::string& str() const { return digits_; }

  friend bool operator==(const TagId&, const TagId&) = default;
  friend auto operator<=>(const TagId&, const TagId&) = default;

 private:
  explicit TagId(std::string digits) : digits_(std::move(digits)) {}
  std::string digits_;
};

struct BeaconFrame {
  TagId tag_id;
  double tx_timestamp = 0.0;
  std::uint64_t sequence = 0;

  friend bool operator==(const BeaconFrame&, const BeaconFrame&) = default;
};

struct DeviceState {
  TagId own_id;
  std::optional<TagId> stored_id;
  bool powered = false;
  int last_vibration = 0;  // 0..10, 0 = off

  friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

struct Feedback {
  enum class Kind { None, SingleBeep, DoubleBeep, Vibrate };

  Kind kind = Kind::None;
  int level = 0;  // 1..10 when kind == Vibrate

  static Feedback none() { return {}; }
  static Feedback single_beep() { return {Kind::SingleBeep, 0}; }
  static Feedback double_beep() { return {Kind::DoubleBeep, 0}; }
  static Feedback vibrate(int level);

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

const char* to_string(Feedback::Kind kind);

class DeviceOffError : public std::logic_error {
 public:
  DeviceOffError() : std::logic_error("device is powered off") {}
};

class NotConfiguredError : public std::logic_error {
 public:
  NotConfiguredError() : std::logic_error("no counterpart id stored on device") {}
};

struct DeviceStep {
  DeviceState state;
  Feedback feedback;
};

inline constexpr int kMaxVibration = 10;

bool validate_id(std::string_view raw);

/// Stores `raw` as the counterpart id. One beep on success, two on failure;
/// the device's own id is rejected.
DeviceStep save_id(const DeviceState& state, std::string_view raw);

std::optional<BeaconFrame> beacon_due(const TagId& tag_id, double now_s, double interval_s);

/// Earliest beacon emission time at or after `t`.
double next_beacon_time(double t, double interval_s);

DeviceStep process_detection(const DeviceState& state, const TagId& frame_id, double rssi_dbm,
                             const PropagationParams& p);

/// Linear map of [threshold, ref_power] onto levels 1..10, round-half-up,
/// 0 below threshold.
int vibration_level(double rssi_dbm, const PropagationParams& p);

}  // namespace sdsim
