#pragma once

// Physical layer of the simulator: hall geometry, log-distance radio
// propagation with log-normal shadowing, the reader's directional antenna
// and the spherical-spreading acoustic model used by the name-calling
// baseline.

#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace sdsim {

using Rng = std::mt19937_64;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, [0, 2pi)

  Point position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Hall {
  double width = 25.0;
  double depth = 20.0;

  double area() const { return width * depth; }
  double diagonal() const;
  bool contains(Point p) const;
  void validate() const;

  friend bool operator==(const Hall&, const Hall&) = default;
};

// Rectangle of the given area; aspect = width / depth.
Hall make_hall(double area_m2, double aspect);

struct PropagationParams {
  double ref_power_dbm = -40.0;
  double ref_distance_m = 1.0;
  double path_loss_exponent = 2.0;
  double shadowing_sigma_db = 4.0;
  double detection_threshold_dbm = -74.0;

  void validate() const;
  friend bool operator==(const PropagationParams&, const PropagationParams&) = default;
};

/// Parabolic-in-dB main lobe with -3 dB points at +/- beamwidth/2 and a flat
/// back-lobe floor.
struct AntennaPattern {
  double beamwidth_deg = 60.0;
  double backlobe_floor_db = -20.0;

  void validate() const;
  friend bool operator==(const AntennaPattern&, const AntennaPattern&) = default;
};

struct AcousticParams {
  double call_level_db_at_1m = 75.0;
  double ambient_level_db = 65.0;
  double detection_margin_db = 0.0;
  double bearing_error_sigma_deg = 30.0;

  void validate() const;
  friend bool operator==(const AcousticParams&, const AcousticParams&) = default;
};

/// One reader measurement: antenna bearing, received power, and the id
/// carried by the beacon that produced it.
struct RssiSample {
  double bearing = 0.0;
  double rssi_dbm = 0.0;
  std::string tag_id;

  friend bool operator==(const RssiSample&, const RssiSample&) = default;
};

class CoincidentPointsError : public std::invalid_argument {
 public:
  CoincidentPointsError() : std::invalid_argument("bearing undefined for coincident points") {}
};

double deg_to_rad(double deg);
double rad_to_deg(double rad);
/// Wraps to [0, 2pi).
double wrap_two_pi(double angle);
/// Wraps to [-pi, pi].
double wrap_pi(double angle);
/// Smallest absolute difference between two angles, in [0, pi].
double angular_distance(double a, double b);

double distance(Point a, Point b);

/// Received power at `distance` on boresight, no noise. Distances below the
/// reference distance clamp to it.
double path_loss_rssi(double distance_m, const PropagationParams& p);

double antenna_gain(double offset_rad, const AntennaPattern& a);

/// Draws one reader measurement of the tag at `tx`. Returns nullopt when the
/// received power falls below the detection threshold.
std::optional<RssiSample> sample_rssi(const Pose& tx, const Pose& rx, double rx_antenna_bearing,
                                      const PropagationParams& p, const AntennaPattern& a,
                                      Rng& rng, const std::string& tag_id = {});

/// Zero-noise boresight distance at which the tag drops below threshold.
double detection_range(const PropagationParams& p);

double acoustic_level(double call_level_db_at_1m, double distance_m);
bool is_audible(double level_at_listener_db, const AcousticParams& ac);
/// Distance at which a call at `call_level_db_at_1m` is exactly audible.
double audible_range(double call_level_db_at_1m, const AcousticParams& ac);

double bearing_between(Point a, Point b);
inline double bearing_between(const Pose& a, const Pose& b) {
  return bearing_between(a.position(), b.position());
}

Point clamp_to_hall(Point pos, const Hall& h);

}  // namespace sdsim
