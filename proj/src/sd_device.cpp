#include "sdsim/sd_device.hpp"

#include <algorithm>
#include <cmath>

namespace sdsim {

namespace {

constexpr double kBeaconEpsilon = 1e-9;

}  // namespace

std::optional<TagId> TagId::try_parse(std::string_view raw) {
  if (!validate_id(raw)) return std::nullopt;
  return TagId(std::string(raw));
}

TagId TagId::parse(std::string_view raw) {
  auto id = try_parse(raw);
  if (!id) throw std::invalid_argument("tag id must be exactly 9 decimal digits, got '" + std::string(raw) + "'");
  return *id;
}

Feedback Feedback::vibrate(int level) {
  if (level < 1 || level > kMaxVibration) throw std::out_of_range("vibration level must be in [1, 10]");
  return {Kind::Vibrate, level};
}

const char* to_string(Feedback::Kind kind) {
  switch (kind) {
    case Feedback::Kind::None: return "none";
    case Feedback::Kind::SingleBeep: return "single_beep";
    case Feedback::Kind::DoubleBeep: return "double_beep";
    case Feedback::Kind::Vibrate: return "vibrate";
  }
  return "unknown";
}

bool validate_id(std::string_view raw) {
  return raw.size() == TagId::kLength &&
         std::all_of(raw.begin(), raw.end(), [](char c) { return c >= '0' && c <= '9'; });
}

DeviceStep save_id(const DeviceState& state, std::string_view raw) {
  if (!state.powered) throw DeviceOffError();
  auto id = TagId::try_parse(raw);
  if (!id || *id == state.own_id) return {state, Feedback::double_beep()};
  DeviceState next = state;
  next.stored_id = *id;
  return {next, Feedback::single_beep()};
}

std::optional<BeaconFrame> beacon_due(const TagId& tag_id, double now_s, double interval_s) {
  if (!(interval_s > 0.0)) throw std::invalid_argument("beacon interval must be > 0");
  const double k = std::round(now_s / interval_s);
  if (k < 0.0 || std::abs(k * interval_s - now_s) > kBeaconEpsilon) return std::nullopt;
  return BeaconFrame{tag_id, now_s, static_cast<std::uint64_t>(k)};
}

double next_beacon_time(double t, double interval_s) {
  if (!(interval_s > 0.0)) throw std::invalid_argument("beacon interval must be > 0");
  const double k = std::max(0.0, std::ceil((t - kBeaconEpsilon) / interval_s));
  return k * interval_s;
}

DeviceStep process_detection(const DeviceState& state, const TagId& frame_id, double rssi_dbm,
                             const PropagationParams& p) {
  if (!state.powered) throw DeviceOffError();
  if (!state.stored_id) throw NotConfiguredError();
  if (frame_id != *state.stored_id) return {state, Feedback::none()};
  const int level = vibration_level(rssi_dbm, p);
  if (level == 0) return {state, Feedback::none()};
  DeviceState next = state;
  next.last_vibration = level;
  return {next, Feedback::vibrate(level)};
}

int vibration_level(double rssi_dbm, const PropagationParams& p) {
  if (!(rssi_dbm >= p.detection_threshold_dbm)) return 0;
  const double span = p.ref_power_dbm - p.detection_threshold_dbm;
  const double scaled = 1.0 + (kMaxVibration - 1) * (rssi_dbm - p.detection_threshold_dbm) / span;
  const int level = static_cast<int>(std::floor(scaled + 0.5));
  return std::clamp(level, 1, kMaxVibration);
}

}  // namespace sdsim
