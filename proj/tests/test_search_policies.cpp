#include "sdsim/search_policies.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sdsim;

namespace {

constexpr double kPi = std::numbers::pi;

PropagationParams quiet() {
  PropagationParams p;
  p.shadowing_sigma_db = 0.0;
  return p;
}

// Brute-force oracle: evaluate the noiseless received power at every bearing
// straight from the path-loss and gain formulas and keep the first maximum.
std::optional<double> oracle_bearing(const Pose& rx, const Pose& tx, int n, const PropagationParams& p,
                                     const AntennaPattern& a) {
  const double dx = tx.x - rx.x;
  const double dy = tx.y - rx.y;
  const double d = std::max(std::hypot(dx, dy), p.ref_distance_m);
  const double loss = p.ref_power_dbm - 10.0 * p.path_loss_exponent * std::log10(d / p.ref_distance_m);
  const double true_bearing = std::atan2(dy, dx);
  std::optional<double> best;
  double best_power = -1e300;
  for (int k = 0; k < n; ++k) {
    const double b = rx.heading + k * 2.0 * kPi / n;
    double off = std::fmod(std::fabs(b - true_bearing), 2.0 * kPi);
    if (off > kPi) off = 2.0 * kPi - off;
    const double ratio = rad_to_deg(off) / a.beamwidth_deg;
    const double gain = std::max(-12.0 * ratio * ratio, a.backlobe_floor_db);
    const double power = loss + gain;
    if (power >= p.detection_threshold_dbm && power > best_power) {
      best_power = power;
      best = std::fmod(b, 2.0 * kPi);
    }
  }
  return best;
}

WorldView view_with(Pose visitee, double dt = 0.1) {
  return WorldView{Hall{}, visitee, TagId::parse("100000002"), quiet(), AntennaPattern{}, dt};
}

}  // namespace

TEST_CASE("scan_360 examples") {
  Rng rng(1);
  const PropagationParams p = quiet();
  const AntennaPattern a;

  SUBCASE("target due +x") {
    const ScanResult s = scan_360({0, 0, 0}, {10, 0, 0}, 12, p, a, rng);
    REQUIRE(s.best_bearing);
    CHECK(*s.best_bearing == 0.0);
    CHECK(s.samples.size() == 12);
  }
  SUBCASE("target at 90 degrees") {
    const ScanResult s = scan_360({0, 0, 0}, {0, 10, 0}, 12, p, a, rng);
    REQUIRE(s.best_bearing);
    CHECK(*s.best_bearing == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(*s.best_bearing == doctest::Approx(*oracle_bearing({0, 0, 0}, {0, 10, 0}, 12, p, a)));
  }
  SUBCASE("target out of range") {
    const ScanResult s = scan_360({0, 0, 0}, {60, 0, 0}, 12, p, a, rng);
    CHECK_FALSE(s.best_bearing);
    CHECK(s.detected_count() == 0);
    CHECK_FALSE(estimate_bearing(s));
  }
  SUBCASE("samples carry the tag id") {
    const ScanResult s = scan_360({0, 0, 0}, {3, 0, 0}, 12, p, a, rng, "100000002");
    for (const auto& sample : s.samples) {
      if (sample) CHECK(sample->tag_id == "100000002");
    }
  }
}

TEST_CASE("estimate_bearing") {
  CHECK_FALSE(estimate_bearing(ScanResult{}));

  ScanResult single;
  single.samples.assign(12, std::nullopt);
  single.samples[6] = RssiSample{kPi, -60.0, ""};
  single.best_bearing = kPi;
  single.best_rssi = -60.0;
  single.best_index = 6;
  CHECK(*estimate_bearing(single) == kPi);
}

TEST_CASE("scan_360 breaks RSSI ties toward the lowest index") {
  // Target exactly between bearings 0 and 1: both see the same offset.
  const PropagationParams p = quiet();
  Rng rng(3);
  const double mid = kPi / 12.0;
  const ScanResult s = scan_360({0, 0, 0}, {10 * std::cos(mid), 10 * std::sin(mid), 0}, 12, p, AntennaPattern{}, rng);
  REQUIRE(s.best_index);
  REQUIRE(s.samples[0]);
  REQUIRE(s.samples[1]);
  CHECK(s.samples[0]->rssi_dbm == doctest::Approx(s.samples[1]->rssi_dbm).epsilon(1e-12));
  CHECK(*s.best_index == 0);

  // Same tie at indices 2 and 7 by symmetry about the axis between them.
  const double axis = (2 + 7) * kPi / 12.0;  // halfway between bearing 2 and bearing 7
  const ScanResult s2 = scan_360({0, 0, 0}, {3 * std::cos(axis), 3 * std::sin(axis), 0}, 12, p, AntennaPattern{}, rng);
  REQUIRE(s2.samples[2]);
  REQUIRE(s2.samples[7]);
  CHECK(s2.samples[2]->rssi_dbm == doctest::Approx(s2.samples[7]->rssi_dbm).epsilon(1e-12));
}

TEST_CASE("zero-noise scan matches the brute-force oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ux(0.0, 25.0), uy(0.0, 20.0), uh(0.0, 2 * kPi);
  const PropagationParams p = quiet();
  const AntennaPattern a;
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const Pose rx{ux(gen), uy(gen), uh(gen)};
    const Pose tx{ux(gen), uy(gen), 0.0};
    if (distance(rx.position(), tx.position()) < 1e-6) continue;
    const ScanResult s = scan_360(rx, tx, 12, p, a, rng);
    const auto expected = oracle_bearing(rx, tx, 12, p, a);
    REQUIRE(s.best_bearing.has_value() == expected.has_value());
    CHECK(angular_distance(*s.best_bearing, *expected) < 1e-9);
    CHECK(angular_distance(*s.best_bearing, bearing_between(rx, tx)) <= kPi / 12 + 1e-12);
  }
}

TEST_CASE("sd_policy_step") {
  const PolicyParams params;
  Rng rng(5);

  SUBCASE("scan with target in range starts a leg toward it") {
    const VisitorState st{{0, 10, 0}, Scanning{}, 0, 0.0};
    const PolicyStep ps = sd_policy_step(st, view_with({8, 14, 0}), params, rng);
    const auto* walk = std::get_if<Walking>(&ps.state.phase);
    REQUIRE(walk);
    CHECK(walk->remaining_m == params.leg_length_m);
    CHECK(angular_distance(walk->bearing, bearing_between(Point{0, 10}, Point{8, 14})) <= kPi / 12 + 1e-12);
    CHECK(ps.elapsed_s == params.scan_duration_s);
    CHECK(ps.state.scans_done == 1);
    CHECK(std::holds_alternative<ScanAction>(ps.action));
  }
  SUBCASE("scan with target out of range relocates inside the hall") {
    WorldView w = view_with({60, 10, 0});
    w.hall = Hall{80, 20};
    const VisitorState st{{0, 10, 0}, Scanning{}, 0, 0.0};
    const PolicyStep ps = sd_policy_step(st, w, params, rng);
    const auto* reloc = std::get_if<Relocating>(&ps.state.phase);
    REQUIRE(reloc);
    CHECK(w.hall.contains(reloc->target));
    CHECK(std::get<ScanAction>(ps.action).relocate_target == reloc->target);
  }
  SUBCASE("last half metre of a leg") {
    const VisitorState st{{5, 5, 0}, Walking{0.0, 0.5}, 1, 0.0};
    const PolicyStep ps = sd_policy_step(st, view_with({20, 15, 0}, 1.0), params, rng);
    CHECK(std::holds_alternative<Scanning>(ps.state.phase));
    CHECK(ps.state.pose.x == doctest::Approx(5.5));
    CHECK(ps.state.pose.y == doctest::Approx(5.0));
    CHECK(ps.state.path_length_m == doctest::Approx(0.5));
    CHECK(ps.elapsed_s == 1.0);
    CHECK(std::get<MoveAction>(ps.action).finished);
  }
  SUBCASE("a wall ends the leg early") {
    const VisitorState st{{24.95, 5, 0}, Walking{0.0, 3.0}, 1, 0.0};
    const PolicyStep ps = sd_policy_step(st, view_with({10, 10, 0}), params, rng);
    CHECK(ps.state.pose.x == 25.0);
    CHECK(std::holds_alternative<Scanning>(ps.state.phase));
  }
  SUBCASE("relocation arrives and rescans") {
    const VisitorState st{{5, 5, 0}, Relocating{{5.05, 5}}, 1, 0.0};
    const PolicyStep ps = sd_policy_step(st, view_with({20, 15, 0}), params, rng);
    CHECK(ps.state.pose.position() == Point{5.05, 5});
    CHECK(std::holds_alternative<Scanning>(ps.state.phase));
    CHECK(std::get<MoveAction>(ps.action).relocating);
  }
}

TEST_CASE("acoustic_policy_step at 88 dB") {
  AcousticParams ac;
  ac.call_level_db_at_1m = 88.0;
  const PolicyParams params;
  Rng rng(8);

  SUBCASE("10 m is audible both ways") {
    const VisitorState st{{2, 10, 0}, Scanning{}, 0, 0.0};
    const PolicyStep ps = acoustic_policy_step(st, view_with({12, 10, 0}), ac, params, rng);
    const auto& call = std::get<CallAction>(ps.action);
    CHECK(call.level_at_visitee_db == doctest::Approx(68.0));
    CHECK(call.heard_by_visitee);
    CHECK(call.reply_heard);
    CHECK(std::holds_alternative<Walking>(ps.state.phase));
    CHECK(ps.elapsed_s == params.call_period_s);
  }
  SUBCASE("20 m is not") {
    const VisitorState st{{2, 10, 0}, Scanning{}, 0, 0.0};
    const PolicyStep ps = acoustic_policy_step(st, view_with({22, 10, 0}), ac, params, rng);
    const auto& call = std::get<CallAction>(ps.action);
    CHECK(call.level_at_visitee_db == doctest::Approx(61.9794000867));
    CHECK_FALSE(call.heard_by_visitee);
    CHECK(std::holds_alternative<Relocating>(ps.state.phase));
  }
  SUBCASE("no bearing noise walks the true bearing") {
    ac.bearing_error_sigma_deg = 0.0;
    const VisitorState st{{2, 4, 0}, Scanning{}, 0, 0.0};
    const PolicyStep ps = acoustic_policy_step(st, view_with({8, 12, 0}), ac, params, rng);
    const auto* walk = std::get_if<Walking>(&ps.state.phase);
    REQUIRE(walk);
    CHECK(walk->bearing == doctest::Approx(std::atan2(8.0, 6.0)).epsilon(1e-14));
  }
}

TEST_CASE("visitee_step is the identity") {
  CHECK(visitee_step({5, 5, 0}) == Pose{5, 5, 0});
  CHECK(visitee_step({0, 0, kPi}) == Pose{0, 0, kPi});
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 100; ++i) {
    const Pose p{u(gen), u(gen), u(gen)};
    CHECK(visitee_step(p) == p);
  }
}

TEST_CASE("relocate_target") {
  const Hall hall;
  Rng a(42), b(42);
  const Point pa = relocate_target(a, hall, {12.5, 10, 0}, 10.0);
  const Point pb = relocate_target(b, hall, {12.5, 10, 0}, 10.0);
  CHECK(pa == pb);

  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Point p = relocate_target(rng, hall, {12.5, 10, 0}, 10.0);
    CHECK(hall.contains(p));
    CHECK(distance(p, {12.5, 10}) >= 5.0);
  }
}

TEST_CASE("visitor stays inside the hall") {
  const PolicyParams params;
  AcousticParams ac;
  Rng rng(13);
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> ux(0.0, 25.0), uy(0.0, 20.0);
  WorldView w = view_with({ux(gen), uy(gen), 0});
  w.propagation.shadowing_sigma_db = 4.0;
  VisitorState sd{{0, 10, 0}, Scanning{}, 0, 0.0};
  VisitorState acoustic = sd;
  bool all_inside = true;
  for (int i = 0; i < 100000; ++i) {
    if (i % 500 == 0) w.visitee = {ux(gen), uy(gen), 0};
    sd = sd_policy_step(sd, w, params, rng).state;
    acoustic = acoustic_policy_step(acoustic, w, ac, params, rng).state;
    all_inside = all_inside && w.hall.contains(sd.pose.position()) && w.hall.contains(acoustic.pose.position());
  }
  CHECK(all_inside);
}

TEST_CASE("PolicyParams validation") {
  CHECK_NOTHROW(PolicyParams{}.validate());
  PolicyParams p;
  p.n_bearings = 7;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.contact_radius_m = p.leg_length_m;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.walk_speed_mps = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
