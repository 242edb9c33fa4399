#include "sdsim/sim_engine.hpp"

#include "sdsim/seeding.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sdsim {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kPolicyStream = 2;

constexpr std::array kEventNames = {"Scan",     "BearingFound", "NoDetection", "WalkLeg", "Relocate",
                                    "Call",     "ReplyHeard",   "Contact",     "Timeout"};

Event make_event(double t, EventKind kind, double elapsed, ordered_json payload = ordered_json::object()) {
  return Event{t, kind, elapsed, std::move(payload)};
}

ordered_json relocate_payload(Point target) { return {{"target_x", target.x}, {"target_y", target.y}}; }

void append_scan_events(WorldState& w, const Config& cfg, const ScanAction& action, double t0,
                        std::vector<Event>& out) {
  const auto& samples = action.scan.samples;
  const double dwell = cfg.policy.scan_duration_s / static_cast<double>(samples.size());
  ordered_json rssi = ordered_json::array();
  ordered_json vibration = ordered_json::array();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k]) {
      rssi.push_back(nullptr);
      vibration.push_back(0);
      continue;
    }
    // The reader hears the first beacon the tag emits while the antenna
    // dwells on this bearing.
    const double heard_at = next_beacon_time(t0 + static_cast<double>(k) * dwell, cfg.sim.beacon_interval_s);
    const auto frame = beacon_due(w.visitee_tag, heard_at, cfg.sim.beacon_interval_s);
    if (!frame) throw std::logic_error("beacon schedule out of step with scan dwell");
    const DeviceStep detection = process_detection(w.visitor_device, frame->tag_id, samples[k]->rssi_dbm, cfg.propagation);
    w.visitor_device = detection.state;
    rssi.push_back(samples[k]->rssi_dbm);
    vibration.push_back(detection.feedback.level);
  }

  const Pose& pose = w.visitor.pose;
  ordered_json payload = {
      {"x", pose.x},
      {"y", pose.y},
      {"visitee_x", w.visitee_pose.x},
      {"visitee_y", w.visitee_pose.y},
      {"detected", action.scan.detected_count()},
      {"rssi", std::move(rssi)},
      {"vibration", vibration},
  };
  const double scan_s = cfg.policy.scan_duration_s;
  out.push_back(make_event(w.time_s, EventKind::Scan, scan_s, std::move(payload)));

  if (action.scan.best_index) {
    const std::size_t best = *action.scan.best_index;
    out.push_back(make_event(w.time_s, EventKind::BearingFound, 0.0,
                             {{"bearing", *action.scan.best_bearing},
                              {"rssi", *action.scan.best_rssi},
                              {"vibration", vibration[best]}}));
  } else {
    out.push_back(make_event(w.time_s, EventKind::NoDetection, 0.0));
    out.push_back(make_event(w.time_s, EventKind::Relocate, 0.0, relocate_payload(*action.relocate_target)));
  }
}

void append_call_events(const WorldState& w, const CallAction& call, double elapsed, std::vector<Event>& out) {
  out.push_back(make_event(w.time_s, EventKind::Call, elapsed,
                           {{"x", w.visitor.pose.x},
                            {"y", w.visitor.pose.y},
                            {"visitee_x", w.visitee_pose.x},
                            {"visitee_y", w.visitee_pose.y},
                            {"level_at_visitee_db", call.level_at_visitee_db},
                            {"heard_by_visitee", call.heard_by_visitee}}));
  if (call.reply_heard) {
    out.push_back(make_event(w.time_s, EventKind::ReplyHeard, 0.0,
                             {{"bearing", *call.bearing}, {"level_db", call.reply_level_db}}));
  } else {
    out.push_back(make_event(w.time_s, EventKind::NoDetection, 0.0));
    out.push_back(make_event(w.time_s, EventKind::Relocate, 0.0, relocate_payload(*call.relocate_target)));
  }
}

}  // namespace

const char* to_string(Condition c) { return c == Condition::SD ? "sd" : "acoustic"; }

const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::Contact: return "contact";
    case Status::Timeout: return "timeout";
  }
  return "unknown";
}

std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "sd") return Condition::SD;
  if (s == "acoustic") return Condition::Acoustic;
  return std::nullopt;
}

std::optional<Status> parse_status(std::string_view s) {
  for (Status st : {Status::Running, Status::Contact, Status::Timeout}) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

const char* to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (s == kEventNames[i]) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::string to_json_line(const Event& e) {
  ordered_json j = {{"t", e.t}, {"kind", to_string(e.kind)}, {"dt", e.elapsed_s}};
  for (const auto& [key, value] : e.payload.items()) j[key] = value;
  return j.dump();
}

ordered_json to_json(const TrialResult& r) {
  return {
      {"status", to_string(r.status)},
      {"time_to_contact_s", r.time_to_contact_s ? ordered_json(*r.time_to_contact_s) : ordered_json(nullptr)},
      {"scans", r.scans},
      {"path_length_m", r.path_length_m},
      {"seed", r.seed},
      {"event_count", r.event_count},
  };
}

TrialResult trial_result_from_json(const nlohmann::json& j) {
  TrialResult r;
  const auto status = parse_status(j.at("status").get<std::string>());
  if (!status) throw std::invalid_argument("unknown trial status '" + j.at("status").get<std::string>() + "'");
  r.status = *status;
  if (!j.at("time_to_contact_s").is_null()) r.time_to_contact_s = j.at("time_to_contact_s").get<double>();
  r.scans = j.at("scans").get<int>();
  r.path_length_m = j.at("path_length_m").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.event_count = j.at("event_count").get<std::size_t>();
  return r;
}

WorldState init_trial(const Config& cfg, std::uint64_t seed) {
  cfg.validate();

  Rng placement(derive_seed(seed, {kPlacementStream}));
  std::uniform_real_distribution<double> ux(0.0, cfg.hall.width);
  std::uniform_real_distribution<double> uy(0.0, cfg.hall.depth);
  const double vx = ux(placement);
  const double vy = uy(placement);
  const Pose visitee{vx, vy, 0.0};

  const Point door = cfg.entrance();
  const Point centre{cfg.hall.width / 2.0, cfg.hall.depth / 2.0};
  const double heading = door == centre ? 0.0 : bearing_between(door, centre);

  // The counterpart id is entered before arriving at the meeting place.
  DeviceState device{cfg.ids.visitor_id, std::nullopt, true, 0};
  const DeviceStep saved = save_id(device, cfg.ids.visitee_id.str());
  if (saved.feedback.kind != Feedback::Kind::SingleBeep) {
    throw ConfigError("ids.visitee_id: rejected by the device");
  }

  return WorldState{
      0.0,
      VisitorState{Pose{door.x, door.y, heading}, Scanning{}, 0, 0.0},
      visitee,
      saved.state,
      cfg.ids.visitee_id,
      Status::Running,
      seed,
      Rng(derive_seed(seed, {kPolicyStream})),
  };
}

Status check_termination(const WorldState& world, const Config& cfg) {
  if (distance(world.visitor.pose.position(), world.visitee_pose.position()) <= cfg.policy.contact_radius_m) {
    return Status::Contact;
  }
  if (world.time_s >= cfg.sim.timeout_s) return Status::Timeout;
  return Status::Running;
}

std::vector<Event> step(WorldState& world, const Config& cfg, Condition condition) {
  if (world.status != Status::Running) throw AlreadyTerminatedError();

  // A walking sub-step never runs past the timeout cap.
  const double dt = std::min(cfg.sim.dt_s, cfg.sim.timeout_s - world.time_s);
  const WorldView view{cfg.hall, world.visitee_pose, world.visitee_tag, cfg.propagation, cfg.antenna, dt};
  PolicyStep ps = condition == Condition::SD
                      ? sd_policy_step(world.visitor, view, cfg.policy, world.rng)
                      : acoustic_policy_step(world.visitor, view, cfg.acoustic, cfg.policy, world.rng);

  const double t0 = world.time_s;
  world.time_s += ps.elapsed_s;
  world.visitor = std::move(ps.state);
  world.visitee_pose = visitee_step(world.visitee_pose);

  std::vector<Event> events;
  if (const auto* scan = std::get_if<ScanAction>(&ps.action)) {
    append_scan_events(world, cfg, *scan, t0, events);
  } else if (const auto* call = std::get_if<CallAction>(&ps.action)) {
    append_call_events(world, *call, ps.elapsed_s, events);
  } else {
    const auto& move = std::get<MoveAction>(ps.action);
    events.push_back(make_event(world.time_s, EventKind::WalkLeg, ps.elapsed_s,
                                {{"x", move.to.x},
                                 {"y", move.to.y},
                                 {"moved_m", distance(move.from, move.to)},
                                 {"mode", move.relocating ? "relocate" : "leg"},
                                 {"finished", move.finished}}));
  }

  world.status = check_termination(world, cfg);
  if (world.status != Status::Running) {
    const Pose& p = world.visitor.pose;
    events.push_back(make_event(world.time_s,
                                world.status == Status::Contact ? EventKind::Contact : EventKind::Timeout, 0.0,
                                {{"x", p.x},
                                 {"y", p.y},
                                 {"visitee_x", world.visitee_pose.x},
                                 {"visitee_y", world.visitee_pose.y},
                                 {"distance_m", distance(p.position(), world.visitee_pose.position())}}));
  }
  return events;
}

TrialRun run_trial(const Config& cfg, std::uint64_t seed, Condition condition, bool keep_events) {
  WorldState world = init_trial(cfg, seed);
  TrialRun run;
  std::size_t count = 0;
  while (world.status == Status::Running) {
    auto events = step(world, cfg, condition);
    count += events.size();
    if (keep_events) std::move(events.begin(), events.end(), std::back_inserter(run.events));
  }
  run.result.status = world.status;
  if (world.status == Status::Contact) run.result.time_to_contact_s = world.time_s;
  run.result.scans = world.visitor.scans_done;
  run.result.path_length_m = world.visitor.path_length_m;
  run.result.seed = seed;
  run.result.event_count = count;
  return run;
}

}  // namespace sdsim
