#pragma once

// Visitor behaviours. The SD policy scans 360 degrees, walks a fixed leg
// toward the strongest bearing and rescans; with no detection it walks to a
// random spot in the hall and tries again. The acoustic baseline replaces
// the scan with a call-and-reply exchange and a noisy auditory bearing.

#include "sdsim/rf_environment.hpp"
#include "sdsim/sd_device.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace sdsim {

struct PolicyParams {
  int n_bearings = 12;
  double scan_duration_s = 17.0;
  double walk_speed_mps = 1.0;
  double leg_length_m = 5.0;
  double relocate_distance_m = 10.0;
  double contact_radius_m = 1.0;
  double call_period_s = 10.0;

  void validate() const;
  double bearing_step() const { return kTwoPi / n_bearings; }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct ScanResult {
  // One slot per sampled bearing, in sampling order; nullopt = below threshold.
  std::vector<std::optional<RssiSample>> samples;
  std::optional<double> best_bearing;
  std::optional<double> best_rssi;
  std::optional<std::size_t> best_index;

  std::size_t detected_count() const;
  friend bool operator==(const ScanResult&, const ScanResult&) = default;
};

struct Scanning {
  friend bool operator==(const Scanning&, const Scanning&) = default;
};
struct Walking {
  double bearing = 0.0;
  double remaining_m = 0.0;
  friend bool operator==(const Walking&, const Walking&) = default;
};
struct Relocating {
  Point target;
  friend bool operator==(const Relocating&, const Relocating&) = default;
};

// For the acoustic policy, Scanning means "about to call".
using Phase = std::variant<Scanning, Walking, Relocating>;

struct VisitorState {
  Pose pose;
  Phase phase = Scanning{};
  int scans_done = 0;
  double path_length_m = 0.0;

  friend bool operator==(const VisitorState&, const VisitorState&) = default;
};

/// What the visitor can sense plus the physics needed to simulate it.
struct WorldView {
  Hall hall;
  Pose visitee;
  TagId visitee_tag;
  PropagationParams propagation;
  AntennaPattern antenna;
  double dt_s = 0.1;
};

struct ScanAction {
  ScanResult scan;
  std::optional<Point> relocate_target;
};

struct CallAction {
  double level_at_visitee_db = 0.0;
  bool heard_by_visitee = false;
  double reply_level_db = 0.0;
  bool reply_heard = false;
  std::optional<double> bearing;
  std::optional<Point> relocate_target;
};

struct MoveAction {
  Point from;
  Point to;
  bool relocating = false;
  bool finished = false;  // leg exhausted, wall hit, or relocation target reached
};

using Action = std::variant<ScanAction, CallAction, MoveAction>;

struct PolicyStep {
  VisitorState state;
  Action action;
  double elapsed_s = 0.0;
};

/// Samples `n_bearings` equally spaced antenna bearings starting at the
/// visitor's heading. Ties on RSSI go to the lowest bearing index.
ScanResult scan_360(const Pose& visitor_pose, const Pose& tag_pose, int n_bearings,
                    const PropagationParams& p, const AntennaPattern& a, Rng& rng,
                    const std::string& tag_id = {});

std::optional<double> estimate_bearing(const ScanResult& scan);

PolicyStep sd_policy_step(const VisitorState& state, const WorldView& world,
                          const PolicyParams& params, Rng& rng);

PolicyStep acoustic_policy_step(const VisitorState& state, const WorldView& world,
                                const AcousticParams& ac, const PolicyParams& params, Rng& rng);

inline Pose visitee_step(const Pose& pose) { return pose; }

/// Uniform point in the hall at least relocate_distance_m / 2 from `current`.
/// After 100 rejected draws the last draw is returned.
Point relocate_target(Rng& rng, const Hall& hall, const Pose& current, double relocate_distance_m);

}  // namespace sdsim
