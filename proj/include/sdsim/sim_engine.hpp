#pragma once

// Discrete-time trial executor. A trial is a pure function of
// (config, seed, condition): the visitee is placed uniformly in the hall,
// the visitor enters at the configured door with its SD already holding the
// visitee's id, and steps run until contact or the timeout cap.

#include "sdsim/config.hpp"
#include "sdsim/sd_device.hpp"
#include "sdsim/search_policies.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdsim {

enum class Condition { SD, Acoustic };
enum class Status { Running, Contact, Timeout };

const char* to_string(Condition c);
const char* to_string(Status s);
std::optional<Condition> parse_condition(std::string_view s);
std::optional<Status> parse_status(std::string_view s);

enum class EventKind { Scan, BearingFound, NoDetection, WalkLeg, Relocate, Call, ReplyHeard, Contact, Timeout };

const char* to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct Event {
  double t = 0.0;        // simulation time once the event's action completes
  EventKind kind = EventKind::Scan;
  double elapsed_s = 0.0;  // time consumed by this event
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  bool terminal() const { return kind == EventKind::Contact || kind == EventKind::Timeout; }
};

/// {"t": ..., "kind": "...", "dt": ..., ...payload} on one line.
std::string to_json_line(const Event& e);

struct WorldState {
  double time_s = 0.0;
  VisitorState visitor;
  Pose visitee_pose;
  DeviceState visitor_device;
  TagId visitee_tag;
  Status status = Status::Running;
  std::uint64_t seed = 0;
  Rng rng;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct TrialResult {
  std::optional<double> time_to_contact_s;
  int scans = 0;
  double path_length_m = 0.0;
  Status status = Status::Running;
  std::uint64_t seed = 0;
  std::size_t event_count = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

nlohmann::ordered_json to_json(const TrialResult& r);
TrialResult trial_result_from_json(const nlohmann::json& j);

class AlreadyTerminatedError : public std::logic_error {
 public:
  AlreadyTerminatedError() : std::logic_error("trial has already terminated") {}
};

/// Throws ConfigError for an invalid config.
WorldState init_trial(const Config& cfg, std::uint64_t seed);

/// Advances the world by one policy action and returns the events it
/// produced, including the terminal event when the trial ends.
std::vector<Event> step(WorldState& world, const Config& cfg, Condition condition);

Status check_termination(const WorldState& world, const Config& cfg);

struct TrialRun {
  TrialResult result;
  std::vector<Event> events;
};

TrialRun run_trial(const Config& cfg, std::uint64_t seed, Condition condition, bool keep_events = true);

}  // namespace sdsim
