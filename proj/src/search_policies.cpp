#include "sdsim/search_policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdsim {

namespace {

constexpr double kLegEpsilon = 1e-9;
constexpr int kMaxRelocateDraws = 100;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

Point begin_relocation(VisitorState& next, const WorldView& world, const PolicyParams& params, Rng& rng) {
  const Point target = relocate_target(rng, world.hall, next.pose, params.relocate_distance_m);
  if (target != next.pose.position()) next.pose.heading = bearing_between(next.pose.position(), target);
  next.phase = Relocating{target};
  return target;
}

PolicyStep move_step(const VisitorState& state, const WorldView& world, const PolicyParams& params) {
  VisitorState next = state;
  const Point from = state.pose.position();
  const double reach = params.walk_speed_mps * world.dt_s;
  MoveAction move{from, from, false, false};

  if (const auto* walk = std::get_if<Walking>(&state.phase)) {
    const double step = std::min(walk->remaining_m, reach);
    const Point desired{from.x + step * std::cos(walk->bearing), from.y + step * std::sin(walk->bearing)};
    const Point to = clamp_to_hall(desired, world.hall);
    const double remaining = walk->remaining_m - step;
    const bool hit_wall = to != desired;
    move.to = to;
    move.finished = hit_wall || remaining <= kLegEpsilon;
    next.phase = move.finished ? Phase{Scanning{}} : Phase{Walking{walk->bearing, remaining}};
  } else if (const auto* reloc = std::get_if<Relocating>(&state.phase)) {
    const double left = distance(from, reloc->target);
    move.relocating = true;
    if (left <= reach) {
      move.to = reloc->target;
      move.finished = true;
      next.phase = Scanning{};
    } else {
      const double bearing = bearing_between(from, reloc->target);
      move.to = clamp_to_hall({from.x + reach * std::cos(bearing), from.y + reach * std::sin(bearing)},
                              world.hall);
    }
  } else {
    throw std::logic_error("move_step called while scanning");
  }

  next.pose.x = move.to.x;
  next.pose.y = move.to.y;
  next.path_length_m += distance(from, move.to);
  return {std::move(next), move, world.dt_s};
}

}  // namespace

void PolicyParams::validate() const {
  require(n_bearings >= 4 && 360 % n_bearings == 0,
          "policy.n_bearings must be >= 4 and divide 360");
  require(positive(scan_duration_s), "policy.scan_duration_s must be > 0");
  require(positive(walk_speed_mps), "policy.walk_speed_mps must be > 0");
  require(positive(leg_length_m), "policy.leg_length_m must be > 0");
  require(positive(relocate_distance_m), "policy.relocate_distance_m must be > 0");
  require(positive(contact_radius_m), "policy.contact_radius_m must be > 0");
  require(positive(call_period_s), "policy.call_period_s must be > 0");
  require(contact_radius_m < leg_length_m, "policy.contact_radius_m must be < leg_length_m");
}

std::size_t ScanResult::detected_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.has_value(); }));
}

ScanResult scan_360(const Pose& visitor_pose, const Pose& tag_pose, int n_bearings,
                    const PropagationParams& p, const AntennaPattern& a, Rng& rng,
                    const std::string& tag_id) {
  ScanResult scan;
  scan.samples.reserve(static_cast<std::size_t>(n_bearings));
  const double step = kTwoPi / n_bearings;
  for (int k = 0; k < n_bearings; ++k) {
    const double bearing = wrap_two_pi(visitor_pose.heading + k * step);
    auto sample = sample_rssi(tag_pose, visitor_pose, bearing, p, a, rng, tag_id);
    if (sample && (!scan.best_rssi || sample->rssi_dbm > *scan.best_rssi)) {
      scan.best_rssi = sample->rssi_dbm;
      scan.best_bearing = sample->bearing;
      scan.best_index = static_cast<std::size_t>(k);
    }
    scan.samples.push_back(std::move(sample));
  }
  return scan;
}

std::optional<double> estimate_bearing(const ScanResult& scan) { return scan.best_bearing; }

PolicyStep sd_policy_step(const VisitorState& state, const WorldView& world,
                          const PolicyParams& params, Rng& rng) {
  if (!std::holds_alternative<Scanning>(state.phase)) return move_step(state, world, params);

  VisitorState next = state;
  next.scans_done += 1;
  ScanAction action;
  action.scan = scan_360(state.pose, world.visitee, params.n_bearings, world.propagation,
                         world.antenna, rng, world.visitee_tag.str());
  if (auto bearing = estimate_bearing(action.scan)) {
    next.pose.heading = *bearing;
    next.phase = Walking{*bearing, params.leg_length_m};
  } else {
    action.relocate_target = begin_relocation(next, world, params, rng);
  }
  return {std::move(next), std::move(action), params.scan_duration_s};
}

PolicyStep acoustic_policy_step(const VisitorState& state, const WorldView& world,
                                const AcousticParams& ac, const PolicyParams& params, Rng& rng) {
  if (!std::holds_alternative<Scanning>(state.phase)) return move_step(state, world, params);

  VisitorState next = state;
  next.scans_done += 1;
  CallAction call;
  const double d = distance(state.pose.position(), world.visitee.position());
  call.level_at_visitee_db = acoustic_level(ac.call_level_db_at_1m, d);
  call.heard_by_visitee = is_audible(call.level_at_visitee_db, ac);
  if (call.heard_by_visitee) {
    // The reply is made at the same level as the call.
    call.reply_level_db = acoustic_level(ac.call_level_db_at_1m, d);
    call.reply_heard = is_audible(call.reply_level_db, ac);
  }
  if (call.reply_heard) {
    double bearing = d > 0.0 ? bearing_between(state.pose, world.visitee) : state.pose.heading;
    if (ac.bearing_error_sigma_deg > 0.0) {
      std::normal_distribution<double> error(0.0, deg_to_rad(ac.bearing_error_sigma_deg));
      bearing += error(rng);
    }
    bearing = wrap_two_pi(bearing);
    call.bearing = bearing;
    next.pose.heading = bearing;
    next.phase = Walking{bearing, params.leg_length_m};
  } else {
    call.relocate_target = begin_relocation(next, world, params, rng);
  }
  return {std::move(next), call, params.call_period_s};
}

Point relocate_target(Rng& rng, const Hall& hall, const Pose& current, double relocate_distance_m) {
  std::uniform_real_distribution<double> ux(0.0, hall.width);
  std::uniform_real_distribution<double> uy(0.0, hall.depth);
  const double min_gap = relocate_distance_m / 2.0;
  Point candidate;
  for (int attempt = 0; attempt < kMaxRelocateDraws; ++attempt) {
    candidate = {ux(rng), uy(rng)};
    if (distance(candidate, current.position()) >= min_gap) break;
  }
  return candidate;
}

}  // namespace sdsim
