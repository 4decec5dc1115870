#include <cmath>

#include <doctest.h>

#include "adaptnet/error.hpp"
#include "adaptnet/modes.hpp"

using namespace adaptnet;

namespace {

ScenarioConfig still_config(std::int64_t uavs, std::int64_t targets) {
  ScenarioConfig c;
  c.uav_count = uavs;
  c.target_count = targets;
  c.slow_sigma = c.fast_sigma = c.erratic_sigma = 0.0;
  c.erratic_heading_prob = 0.0;
  c.detection_law = "disk";
  c.radar_active_fraction = 1.0;
  return c;
}

void freeze_targets(World& w, std::initializer_list<std::pair<double, double>> positions) {
  std::size_t i = 0;
  for (const auto& [x, y] : positions) {
    auto& t = w.targets.at(i++);
    t.position.x = x;
    t.position.y = y;
    t.vx = t.vy = 0.0;
  }
}

// Deterministic replay of a fixed joint script: with the disk law and a
// permanently active radar, a UAV detects every target within range.
double scripted_episode_oracle(World w, const ScenarioConfig& c, const std::vector<int>& script, bool shared) {
  const std::size_t n = w.uavs.size();
  std::vector<int> first(w.targets.size(), -1);
  double total = 0.0;
  std::vector<UavCommand> cmds;
  for (int p : script) cmds.push_back(UavCommand::follow(p));
  for (std::int64_t step = 0; step < c.episode_steps; ++step) {
    advance_world(w, cmds);
    std::vector<double> base(n, -c.time_cost);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t t = 0; t < w.targets.size(); ++t) {
        const double dx = w.uavs[u].position.x - w.targets[t].position.x;
        const double dy = w.uavs[u].position.y - w.targets[t].position.y;
        if (std::sqrt(dx * dx + dy * dy) > c.radar_range) continue;
        if (first[t] < 0) {
          first[t] = static_cast<int>(u);
          base[u] += 1.0;
        } else if (first[t] != static_cast<int>(u)) {
          base[u] -= c.duplicate_penalty;
        }
      }
    }
    double mean = 0.0;
    for (double b : base) mean += b / static_cast<double>(n);
    for (double b : base) total += shared ? b + c.coop_weight * mean : b;
  }
  return total;
}

double run_script(Mode1Env& env, const std::vector<int>& script, std::uint64_t seed,
                  std::initializer_list<std::pair<double, double>> targets, double* oracle, bool shared) {
  env.reset(seed);
  freeze_targets(env.mutable_world(), targets);
  *oracle = scripted_episode_oracle(env.world(), env.config(), script, shared);
  double total = 0.0;
  bool done = false;
  while (!done) {
    const auto r = env.step(script);
    for (double v : r.rewards) total += v;
    done = r.done;
  }
  return total;
}

std::vector<std::vector<double>> same_action(std::size_t n, double w, double g, double p) {
  return std::vector<std::vector<double>>(n, std::vector<double>{w, g, p});
}

}  // namespace

TEST_SUITE("modes") {
  TEST_CASE("no targets in range costs the time penalty every step") {
    ScenarioConfig c = still_config(3, 4);
    c.cooperative = false;
    c.radar_range = 1e-3;
    Mode1Env env(c);
    env.reset(3);
    const std::vector<int> acts{0, 1, 2};
    for (int s = 0; s < 200; ++s) {
      const auto r = env.step(acts);
      for (double v : r.rewards) CHECK(v == doctest::Approx(-0.01));
      CHECK(r.done == (s == 199));
    }
  }

  TEST_CASE("a detection at step three earns one minus the time cost") {
    ScenarioConfig c = still_config(1, 1);
    Mode1Env env(c);
    env.reset(1);
    World& w = env.mutable_world();
    Uav& u = w.uavs[0];
    const auto& wps = w.paths[0].waypoints;
    u.position = {wps[0].x, wps[0].y, 0.0};
    u.assigned_path = 0;
    u.next_waypoint = 1;
    // 7.5 m per step toward +x: ranges 162.5, 155, 147.5 after steps 1..3.
    freeze_targets(w, {{wps[0].x + c.radar_range + 20.0, wps[0].y}});
    const std::vector<int> acts{0};
    auto r1 = env.step(acts);
    auto r2 = env.step(acts);
    auto r3 = env.step(acts);
    CHECK(r1.base_rewards[0] == doctest::Approx(-0.01));
    CHECK(r2.base_rewards[0] == doctest::Approx(-0.01));
    CHECK(r3.base_rewards[0] == doctest::Approx(1.0 - 0.01));
    CHECK(r3.events[0].first_detections == 1);
    CHECK(env.detected_by(0) == 0);
    CHECK(r3.done);
    // One agent: the shared reward is base + 0.5 * base.
    CHECK(r3.rewards[0] == doctest::Approx(1.5 * 0.99));
  }

  TEST_CASE("scripted policies match a hand-rolled replay") {
    ScenarioConfig c = still_config(2, 3);
    c.latency_steps = 100000;
    c.mode1_stop_when_all_detected = false;
    for (bool shared : {true, false}) {
      c.cooperative = shared;
      Mode1Env env(c);
      double good_oracle = 0, worst_oracle = 0, dup_oracle = 0;
      const auto targets = {std::pair{400.0, 90.0}, std::pair{500.0, 910.0}, std::pair{800.0, 240.0}};
      const double good = run_script(env, {0, 2}, 5, targets, &good_oracle, shared);
      const double worst = run_script(env, {1, 1}, 5, targets, &worst_oracle, shared);
      const double dup = run_script(env, {0, 0}, 5, targets, &dup_oracle, shared);
      CHECK(good == doctest::Approx(good_oracle).epsilon(1e-12));
      CHECK(worst == doctest::Approx(worst_oracle).epsilon(1e-12));
      CHECK(dup == doctest::Approx(dup_oracle).epsilon(1e-12));
      CHECK(good - worst == doctest::Approx(good_oracle - worst_oracle).epsilon(1e-12));
      CHECK(good > worst);
      CHECK(dup < good);
    }
  }

  TEST_CASE("mode 1 input validation") {
    Mode1Env env(ScenarioConfig{});
    env.reset(1);
    CHECK_THROWS_AS(env.step(std::vector<int>{0, 1}), InvalidInput);
    CHECK_THROWS_AS(env.step(std::vector<int>{0, 1, 3}), InvalidAction);
  }

  TEST_CASE("mode 1 observations are bounded and rewards reconstruct") {
    ScenarioConfig c;
    c.target_count = 30;
    Mode1Env env(c);
    Rng rng(4);
    const auto obs0 = env.reset(11);
    CHECK(obs0[0].size() == env.observation_dim());
    bool done = false;
    std::size_t steps = 0;
    int detections = 0;
    while (!done) {
      std::vector<int> acts;
      for (std::size_t u = 0; u < env.agent_count(); ++u) acts.push_back(static_cast<int>(rng.uniform_index(3)));
      const auto r = env.step(acts);
      ++steps;
      double mean = 0.0;
      for (std::size_t u = 0; u < env.agent_count(); ++u) {
        const auto& e = r.events[u];
        detections += e.detections;
        const double base = e.first_detections - 0.01 - 0.1 * e.duplicates;
        CHECK(r.base_rewards[u] == doctest::Approx(base).epsilon(1e-14));
        mean += base / 3.0;
      }
      for (std::size_t u = 0; u < env.agent_count(); ++u) {
        CHECK(r.rewards[u] == doctest::Approx(r.base_rewards[u] + 0.5 * mean).epsilon(1e-14));
        REQUIRE(r.observations[u].size() == env.observation_dim());
        for (double v : r.observations[u]) {
          CHECK(v >= -1.0);
          CHECK(v <= 1.0);
        }
      }
      done = r.done;
    }
    CHECK(steps <= 200);
    CHECK(detections > 0);
  }

  TEST_CASE("mode 1 reward traces are reproducible") {
    auto trace = [] {
      Mode1Env env(ScenarioConfig{});
      env.reset(21);
      std::vector<double> out;
      for (int s = 0; s < 120; ++s) {
        const auto r = env.step(std::vector<int>{s % 3, (s / 7) % 3, 2});
        out.insert(out.end(), r.rewards.begin(), r.rewards.end());
        if (r.done) break;
      }
      return out;
    };
    CHECK(trace() == trace());
  }

  TEST_CASE("mode 2 action decoding") {
    const auto d = decode_mode2_action(std::vector<double>{0.3, -0.2, 1.0});
    CHECK(d.high_throughput);
    CHECK_FALSE(d.transmit);
    CHECK(d.priority_weight == 1.0);
    CHECK_FALSE(decode_mode2_action(std::vector<double>{0.0, 0.0, -1.0}).transmit);
    CHECK_THROWS_AS(decode_mode2_action(std::vector<double>{0.0, 0.0}), InvalidAction);
    CHECK_THROWS_AS(decode_mode2_action(std::vector<double>{0.0, 1.5, 0.0}), InvalidAction);
    CHECK_THROWS_AS(decode_mode2_action(std::vector<double>{0.0, std::nan(""), 0.0}), InvalidAction);
  }

  TEST_CASE("with no traffic only the age term remains") {
    ScenarioConfig c;
    Mode2Env env(c);
    env.reset(2);
    env.set_sensing_enabled(false);
    for (int k = 1; k <= 10; ++k) {
      const auto r = env.step(same_action(3, 1.0, 1.0, 0.0));
      for (std::size_t u = 0; u < 3; ++u) {
        // Service covers [k dt, (k + 1) dt] with the last update generated at 0.
        const double avg_age = (k + 0.5) * c.dt;
        CHECK(r.events[u].avg_aoi == doctest::Approx(avg_age));
        CHECK(r.events[u].energy_j == 0.0);
        CHECK(r.rewards[u] == doctest::Approx(-avg_age / c.aoi_norm_s));
      }
    }
  }

  TEST_CASE("one novel packet on ENERGY_SAVING") {
    ScenarioConfig c;
    Mode2Env env(c);
    env.reset(2);
    env.set_sensing_enabled(false);
    env.inject_packet(0, {2.0 * c.frechet_threshold, true}, c.packet_bits_novel);
    const auto r = env.step(same_action(3, -1.0, 1.0, 0.0));
    CHECK(r.events[0].delivered_novel == 1);
    CHECK(r.events[0].energy_j == doctest::Approx(c.low_power_w * c.dt));
    const double age_term = r.events[0].avg_aoi / c.aoi_norm_s;
    CHECK(r.events[0].avg_aoi == doctest::Approx(0.75));
    CHECK(r.rewards[0] == doctest::Approx(1.0 - 4.0 * c.dt / c.energy_norm_j - age_term));
    CHECK(r.rewards[1] == doctest::Approx(-age_term));
    // The first packet carries the tracker's own start time; a later one is fresher.
    env.inject_packet(0, {2.0 * c.frechet_threshold, true}, c.packet_bits_novel);
    const auto next = env.step(same_action(3, -1.0, 1.0, 0.0));
    CHECK(next.events[0].delivered_novel == 1);
    CHECK(next.events[0].avg_aoi < next.events[1].avg_aoi);
  }

  TEST_CASE("holding beats transmitting a redundant stream") {
    ScenarioConfig c;
    c.uav_count = 1;
    double totals[2] = {0.0, 0.0};
    for (int policy = 0; policy < 2; ++policy) {
      Mode2Env env(c);
      env.reset(3);
      env.set_sensing_enabled(false);
      int redundant = 0;
      for (int s = 0; s < 200; ++s) {
        env.inject_packet(0, {0.0, false}, c.packet_bits_summary);
        const auto r = env.step(same_action(1, 1.0, policy == 0 ? 1.0 : -1.0, 0.0));
        totals[policy] += r.rewards[0];
        redundant += r.events[0].sent_redundant;
      }
      if (policy == 0) CHECK(redundant > 0);
      else CHECK(redundant == 0);
    }
    CHECK(totals[1] > totals[0]);
  }

  TEST_CASE("mode 2 observations are bounded and rewards reconstruct") {
    ScenarioConfig c;
    c.target_count = 30;
    Mode2Env env(c);
    Rng rng(5);
    const auto obs0 = env.reset(13);
    CHECK(obs0[0].size() == env.observation_dim());
    CHECK(env.observation_dim() == 20);
    int generated = 0;
    for (int s = 0; s < 200; ++s) {
      std::vector<std::vector<double>> acts;
      for (std::size_t u = 0; u < 3; ++u) acts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      const auto r = env.step(acts);
      for (std::size_t u = 0; u < 3; ++u) {
        const auto& e = r.events[u];
        generated += e.generated;
        const double expect = 1.0 * e.delivered_novel + 0.2 * e.delivered_sub_threshold - 0.5 * e.sent_redundant -
                              e.energy_j / 50.0 - e.avg_aoi / 20.0;
        CHECK(r.rewards[u] == doctest::Approx(expect).epsilon(1e-14));
        CHECK(e.energy_j >= 0.0);
        REQUIRE(r.observations[u].size() == env.observation_dim());
        for (double v : r.observations[u]) {
          CHECK(v >= -1.0);
          CHECK(v <= 1.0);
        }
      }
      CHECK(r.done == (s == 199));
    }
    CHECK(generated > 0);
    CHECK_THROWS_AS(env.step(same_action(2, 0, 0, 0)), InvalidInput);
  }

  TEST_CASE("mode 2 reward traces are reproducible") {
    auto trace = [] {
      Mode2Env env(ScenarioConfig{});
      env.reset(8);
      std::vector<double> out;
      for (int s = 0; s < 100; ++s) {
        const auto r = env.step(same_action(3, s % 2 ? 0.5 : -0.5, 0.5, -0.3));
        out.insert(out.end(), r.rewards.begin(), r.rewards.end());
      }
      return out;
    };
    CHECK(trace() == trace());
  }

  TEST_CASE("mode switch") {
    ModeController ctl;
    ctl.window = 10;
    const std::vector<RelevanceScore> novel(10, RelevanceScore{50.0, true});
    const std::vector<RelevanceScore> redundant(10, RelevanceScore{0.0, false});

    ModeController a = mode_switch(ctl, novel);
    CHECK(a.emphasis == Emphasis::Communication);
    ModeController b = mode_switch(a, redundant);
    CHECK(b.emphasis == Emphasis::Sensing);

    std::vector<RelevanceScore> half(novel.begin(), novel.begin() + 5);
    half.insert(half.end(), redundant.begin(), redundant.begin() + 5);
    CHECK(mode_switch(a, half).emphasis == Emphasis::Communication);
    CHECK(mode_switch(b, half).emphasis == Emphasis::Sensing);

    ModeController partial = mode_switch(ctl, std::span(novel).first(9));
    CHECK(partial.emphasis == Emphasis::Sensing);
    CHECK(partial.recent_novel.size() == 9);

    ModeController zero;
    zero.window = 0;
    CHECK_THROWS_AS(mode_switch(zero, novel), InvalidInput);
    CHECK(ModeController::from_config(ScenarioConfig{}).window == 20);
  }
}
