#include "sdsim/rf_environment.hpp"

#include <algorithm>
#include <cmath>

namespace sdsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double Hall::diagonal() const { return std::hypot(width, depth); }

bool Hall::contains(Point p) const {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= depth;
}

void Hall::validate() const {
  require(std::isfinite(width) && width > 0.0, "hall.width_m must be > 0");
  require(std::isfinite(depth) && depth > 0.0, "hall.depth_m must be > 0");
}

Hall make_hall(double area_m2, double aspect) {
  require(std::isfinite(area_m2) && area_m2 > 0.0, "hall area must be > 0");
  require(std::isfinite(aspect) && aspect > 0.0, "hall aspect must be > 0");
  const double width = std::sqrt(area_m2 * aspect);
  return Hall{width, area_m2 / width};
}

void PropagationParams::validate() const {
  require(std::isfinite(ref_power_dbm), "propagation.ref_power_dbm must be finite");
  require(std::isfinite(ref_distance_m) && ref_distance_m > 0.0,
          "propagation.ref_distance_m must be > 0");
  require(std::isfinite(path_loss_exponent) && path_loss_exponent >= 1.0,
          "propagation.path_loss_exponent must be >= 1");
  require(std::isfinite(shadowing_sigma_db) && shadowing_sigma_db >= 0.0,
          "propagation.shadowing_sigma_db must be >= 0");
  require(std::isfinite(detection_threshold_dbm) && detection_threshold_dbm < ref_power_dbm,
          "propagation.detection_threshold_dbm must be < ref_power_dbm");
}

void AntennaPattern::validate() const {
  require(std::isfinite(beamwidth_deg) && beamwidth_deg > 0.0 && beamwidth_deg <= 360.0,
          "antenna.beamwidth_deg must be in (0, 360]");
  require(std::isfinite(backlobe_floor_db) && backlobe_floor_db <= -3.0,
          "antenna.backlobe_floor_db must be <= -3");
}

void AcousticParams::validate() const {
  require(std::isfinite(call_level_db_at_1m), "acoustic.call_level_db must be finite");
  require(std::isfinite(ambient_level_db), "acoustic.ambient_level_db must be finite");
  require(std::isfinite(detection_margin_db), "acoustic.detection_margin_db must be finite");
  require(std::isfinite(bearing_error_sigma_deg) && bearing_error_sigma_deg >= 0.0,
          "acoustic.bearing_error_sigma_deg must be >= 0");
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double wrap_pi(double angle) {
  double a = wrap_two_pi(angle);
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

double angular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

double path_loss_rssi(double distance_m, const PropagationParams& p) {
  if (!std::isfinite(distance_m) || distance_m < 0.0) {
    throw std::invalid_argument("path_loss_rssi: distance must be finite and non-negative");
  }
  const double d = std::max(distance_m, p.ref_distance_m);
  return p.ref_power_dbm - 10.0 * p.path_loss_exponent * std::log10(d / p.ref_distance_m);
}

double antenna_gain(double offset_rad, const AntennaPattern& a) {
  const double offset = wrap_pi(offset_rad);
  const double ratio = offset / deg_to_rad(a.beamwidth_deg);
  return std::max(-12.0 * ratio * ratio, a.backlobe_floor_db);
}

std::optional<RssiSample> sample_rssi(const Pose& tx, const Pose& rx, double rx_antenna_bearing,
                                      const PropagationParams& p, const AntennaPattern& a,
                                      Rng& rng, const std::string& tag_id) {
  const double d = distance(rx.position(), tx.position());
  // At contact the bearing is undefined; the tag is effectively on boresight.
  const double offset = d > 0.0 ? bearing_between(rx, tx) - rx_antenna_bearing : 0.0;
  double rssi = path_loss_rssi(d, p) + antenna_gain(offset, a);
  if (p.shadowing_sigma_db > 0.0) {
    std::normal_distribution<double> shadow(0.0, p.shadowing_sigma_db);
    rssi += shadow(rng);
  }
  if (rssi < p.detection_threshold_dbm) return std::nullopt;
  return RssiSample{wrap_two_pi(rx_antenna_bearing), rssi, tag_id};
}

double detection_range(const PropagationParams& p) {
  return p.ref_distance_m *
         std::pow(10.0, (p.ref_power_dbm - p.detection_threshold_dbm) / (10.0 * p.path_loss_exponent));
}

double acoustic_level(double call_level_db_at_1m, double distance_m) {
  return call_level_db_at_1m - 20.0 * std::log10(std::max(distance_m, 1.0));
}

bool is_audible(double level_at_listener_db, const AcousticParams& ac) {
  return level_at_listener_db >= ac.ambient_level_db + ac.detection_margin_db;
}

double audible_range(double call_level_db_at_1m, const AcousticParams& ac) {
  const double excess = call_level_db_at_1m - ac.ambient_level_db - ac.detection_margin_db;
  return excess < 0.0 ? 0.0 : std::pow(10.0, excess / 20.0);
}

double bearing_between(Point a, Point b) {
  if (a == b) throw CoincidentPointsError();
  return wrap_two_pi(std::atan2(b.y - a.y, b.x - a.x));
}

Point clamp_to_hall(Point pos, const Hall& h) {
  return {std::clamp(pos.x, 0.0, h.width), std::clamp(pos.y, 0.0, h.depth)};
}

}  // namespace sdsim
