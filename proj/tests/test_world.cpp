#include <cmath>

#include <doctest.h>

#include "adaptnet/config.hpp"
#include "adaptnet/error.hpp"
#include "adaptnet/world.hpp"

using namespace adaptnet;

namespace {

void run(World& w, std::size_t steps, int path = 0) {
  std::vector<UavCommand> cmds(w.uavs.size(), UavCommand::follow(path));
  for (std::size_t s = 0; s < steps; ++s) advance_world(w, cmds);
}

}  // namespace

TEST_SUITE("world") {
  TEST_CASE("default scenario dimensions") {
    const ScenarioConfig config;
    const World w = init_world(config);
    CHECK(w.uavs.size() == 3);
    CHECK(w.targets.size() == 12);
    CHECK(w.time == 0.0);
    CHECK(w.env.seed == 7);
  }

  TEST_CASE("identical configs give identical worlds") {
    ScenarioConfig config;
    World a = init_world(config);
    World b = init_world(config);
    CHECK(world_hash(a) == world_hash(b));
    CHECK(snapshot_json(a) == snapshot_json(b));
    for (std::size_t n : {1u, 17u, 150u}) {
      run(a, n);
      run(b, n);
      CHECK(world_hash(a) == world_hash(b));
      CHECK(snapshot_json(a).dump() == snapshot_json(b).dump());
    }
    config.seed = 8;
    CHECK(world_hash(init_world(config)) != world_hash(init_world(ScenarioConfig{})));
  }

  TEST_CASE("thirty UAVs inside the arena") {
    ScenarioConfig config;
    config.uav_count = 30;
    const World w = init_world(config);
    CHECK(w.uavs.size() == 30);
    for (const auto& u : w.uavs) {
      CHECK(u.position.x > 0.0);
      CHECK(u.position.x < config.arena_width);
      CHECK(u.position.y > 0.0);
      CHECK(u.position.y < config.arena_height);
    }
  }

  TEST_CASE("invalid config names the field") {
    ScenarioConfig config;
    config.dt = 0.0;
    try {
      init_world(config);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "dt");
    }
  }

  TEST_CASE("a still target stays put") {
    ScenarioConfig config;
    config.target_count = 1;
    World w = init_world(config);
    w.targets[0].vx = w.targets[0].vy = 0.0;
    w.motion[static_cast<int>(w.targets[0].cls)].sigma = 0.0;
    w.motion[static_cast<int>(w.targets[0].cls)].heading_resample_prob = 0.0;
    const Point start = w.targets[0].position;
    for (int i = 0; i < 10; ++i) {
      step_targets(w);
      w.time += w.dt;
    }
    CHECK(w.targets[0].position.x == start.x);
    CHECK(w.targets[0].position.y == start.y);
  }

  TEST_CASE("outward motion at a wall reflects inward") {
    ScenarioConfig config;
    config.target_count = 1;
    World w = init_world(config);
    auto& t = w.targets[0];
    w.motion[static_cast<int>(t.cls)] = {100.0, 0.0, 0.0};
    t.position.x = config.arena_width - 1.0;
    t.position.y = 500.0;
    t.vx = 10.0;
    t.vy = 0.0;
    auto tick = [&w] {
      step_targets(w);
      w.time += w.dt;
    };
    tick();
    CHECK(t.vx == -10.0);
    CHECK(t.position.x == doctest::Approx(config.arena_width - 4.0));
    t.position.x = 0.5;
    tick();
    CHECK(t.vx == 10.0);
    CHECK(t.position.x == doctest::Approx(4.5));
    CHECK(t.position.x >= 0.0);
  }

  TEST_CASE("FAST target path equals a scalar replay of the update rule") {
    ScenarioConfig config;
    config.target_count = 1;
    config.target_mix = {0.0, 1.0, 0.0};
    World w = init_world(config);
    REQUIRE(w.targets[0].cls == TargetClass::Fast);
    Rng rng = w.rng;
    double x = w.targets[0].position.x, y = w.targets[0].position.y;
    double vx = w.targets[0].vx, vy = w.targets[0].vy;
    const double dt = config.dt, cap = config.fast_speed_cap, sigma = config.fast_sigma;
    const double W = config.arena_width, H = config.arena_height;
    for (int step = 0; step < 100; ++step) {
      vx += sigma * rng.normal();
      vy += sigma * rng.normal();
      const double s = std::sqrt(vx * vx + vy * vy);
      if (s > cap) {
        vx *= cap / s;
        vy *= cap / s;
      }
      x += vx * dt;
      y += vy * dt;
      if (x < 0) { x = -x; vx = -vx; }
      if (x > W) { x = 2 * W - x; vx = -vx; }
      if (y < 0) { y = -y; vy = -vy; }
      if (y > H) { y = 2 * H - y; vy = -vy; }
      step_targets(w);
      w.time += dt;
      CHECK(w.targets[0].position.x == doctest::Approx(x).epsilon(1e-12));
      CHECK(w.targets[0].position.y == doctest::Approx(y).epsilon(1e-12));
      CHECK(std::hypot(w.targets[0].vx, w.targets[0].vy) <= cap + 1e-9);
    }
    CHECK(w.targets[0].history.size() == 101);
  }

  TEST_CASE("speed stays within class caps") {
    ScenarioConfig config;
    config.target_count = 60;
    World w = init_world(config);
    for (int s = 0; s < 200; ++s) {
      step_targets(w);
      w.time += w.dt;
      for (const auto& t : w.targets) CHECK(std::hypot(t.vx, t.vy) <= w.motion[static_cast<int>(t.cls)].speed_cap + 1e-9);
    }
  }

  TEST_CASE("hold charges idle cost only") {
    ScenarioConfig config;
    config.radar_active_fraction = 1.0;
    World w = init_world(config);
    Uav u = w.uavs[0];
    const Point before = u.position;
    const double battery = u.battery;
    step_uav(u, UavCommand::hold(), w);
    CHECK(u.position.x == before.x);
    CHECK(u.position.y == before.y);
    CHECK(u.battery == doctest::Approx(battery - (config.power_idle_w + config.power_radar_w) * config.dt));
  }

  TEST_CASE("path selection follows the waypoint loop") {
    ScenarioConfig config;
    World w = init_world(config);
    for (int path = 0; path < 3; ++path) {
      Uav u = w.uavs[0];
      const auto& wps = w.paths[path].waypoints;
      u.position = {wps[0].x, wps[0].y, 0.0};
      u.assigned_path = path;
      u.next_waypoint = 1;
      const double leg = std::hypot(wps[1].x - wps[0].x, wps[1].y - wps[0].y);
      const int steps = static_cast<int>(std::ceil(leg / (config.cruise_speed * config.dt)));
      for (int s = 0; s < steps; ++s) {
        step_uav(u, UavCommand::follow(path), w);
        w.time += w.dt;
      }
      CHECK(u.position.x == doctest::Approx(wps[1].x + 0.0).epsilon(0.02));
      CHECK(u.next_waypoint == 2);
      CHECK(std::abs(u.position.y - wps[1].y) <= config.cruise_speed * config.dt);
    }
    Uav u = w.uavs[0];
    CHECK_THROWS_AS(step_uav(u, UavCommand::follow(3), w), InvalidAction);
    CHECK_THROWS_AS(step_uav(u, UavCommand::follow(-1), w), InvalidAction);
  }

  TEST_CASE("battery exhaustion deactivates and freezes the UAV") {
    ScenarioConfig config;
    World w = init_world(config);
    Uav u = w.uavs[0];
    u.battery = 10.0;
    step_uav(u, UavCommand::follow(0), w);
    w.time += w.dt;
    CHECK(u.battery == 0.0);
    CHECK_FALSE(u.active);
    const Point frozen = u.position;
    step_uav(u, UavCommand::follow(1), w);
    CHECK(u.position.x == frozen.x);
    CHECK(u.position.y == frozen.y);
    CHECK(u.battery == 0.0);
  }

  TEST_CASE("containment, energy monotonicity and history length") {
    ScenarioConfig config;
    config.uav_count = 6;
    config.target_count = 30;
    config.battery_j = 3000.0;
    World w = init_world(config);
    std::vector<double> last(w.uavs.size());
    for (std::size_t i = 0; i < w.uavs.size(); ++i) last[i] = w.uavs[i].battery;
    for (std::size_t s = 1; s <= 300; ++s) {
      std::vector<UavCommand> cmds;
      for (std::size_t i = 0; i < w.uavs.size(); ++i) {
        cmds.push_back((s + i) % 5 == 0 ? UavCommand::hold() : UavCommand::follow(static_cast<int>((s / 40 + i) % 3)));
      }
      advance_world(w, cmds);
      CHECK(w.time == doctest::Approx(static_cast<double>(s) * config.dt));
      for (std::size_t i = 0; i < w.uavs.size(); ++i) {
        const auto& u = w.uavs[i];
        CHECK(u.battery <= last[i]);
        CHECK(u.battery >= 0.0);
        last[i] = u.battery;
        CHECK(u.history.size() == s + 1);
        CHECK(u.position.x >= 0.0);
        CHECK(u.position.x <= config.arena_width);
        CHECK(u.position.y >= 0.0);
        CHECK(u.position.y <= config.arena_height);
      }
      for (const auto& t : w.targets) {
        CHECK(t.history.size() == s + 1);
        CHECK(t.position.x >= 0.0);
        CHECK(t.position.x <= config.arena_width);
        CHECK(t.position.y >= 0.0);
        CHECK(t.position.y <= config.arena_height);
      }
    }
    bool any_exhausted = false;
    for (const auto& u : w.uavs) any_exhausted = any_exhausted || !u.active;
    CHECK(any_exhausted);
  }

  TEST_CASE("one command per UAV") {
    World w = init_world(ScenarioConfig{});
    std::vector<UavCommand> cmds(2, UavCommand::hold());
    CHECK_THROWS_AS(advance_world(w, cmds), InvalidInput);
  }

  TEST_CASE("snapshot fields") {
    const auto j = snapshot_json(init_world(ScenarioConfig{}));
    CHECK(j.contains("time"));
    CHECK(j["uavs"].size() == 3);
    CHECK(j["uavs"][0].contains("battery"));
    CHECK(j["targets"][0].contains("class"));
  }
}
