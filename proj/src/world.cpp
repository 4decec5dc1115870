#include "adaptnet/world.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "adaptnet/error.hpp"

namespace adaptnet {

const char* to_string(TargetClass c) {
  switch (c) {
    case TargetClass::Slow: return "SLOW";
    case TargetClass::Fast: return "FAST";
    case TargetClass::Erratic: return "ERRATIC";
  }
  return "UNKNOWN";
}

std::vector<SensingPath> default_sensing_paths(double width, double height) {
  std::vector<SensingPath> paths;
  for (int band = 0; band < 3; ++band) {
    const double c = (2.0 * band + 1.0) * height / 6.0;
    const double half = 0.08 * height;
    paths.push_back({{{0.1 * width, c - half}, {0.9 * width, c - half}, {0.9 * width, c + half}, {0.1 * width, c + half}}});
  }
  return paths;
}

namespace {

std::size_t nearest_waypoint(const SensingPath& path, const Point& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const double d = std::hypot(path.waypoints[i].x - p.x, path.waypoints[i].y - p.y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

TargetClass draw_class(Rng& rng, const std::vector<double>& mix) {
  const double total = mix[0] + mix[1] + mix[2];
  const double u = rng.uniform() * total;
  if (u < mix[0]) return TargetClass::Slow;
  if (u < mix[0] + mix[1]) return TargetClass::Fast;
  return TargetClass::Erratic;
}

void reflect(double& pos, double& vel, double limit) {
  if (pos < 0.0) {
    pos = -pos;
    vel = -vel;
  } else if (pos > limit) {
    pos = 2.0 * limit - pos;
    vel = -vel;
  }
  pos = std::clamp(pos, 0.0, limit);
}

template <class T>
void hash_bytes(std::uint64_t& h, const T& value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
}

}  // namespace

World init_world(const ScenarioConfig& config) { return init_world(config, config.seed); }

World init_world(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  World w;
  w.dt = config.dt;
  w.env = {config.arena_width, config.arena_height, config.sensor_noise_sigma, config.snr_base_db,
           config.snr_weather_penalty_db, seed};
  w.motion[0] = {config.slow_speed_cap, config.slow_sigma, 0.0};
  w.motion[1] = {config.fast_speed_cap, config.fast_sigma, 0.0};
  w.motion[2] = {config.erratic_speed_cap, config.erratic_sigma, config.erratic_heading_prob};
  w.paths = default_sensing_paths(config.arena_width, config.arena_height);
  w.cruise_speed = config.cruise_speed;
  w.energy = {config.power_idle_w, config.power_cruise_w, config.power_radar_w};
  w.rng = Rng(seed);

  const auto n = static_cast<std::size_t>(config.uav_count);
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t rows = (n + cols - 1) / cols;
  for (std::size_t i = 0; i < n; ++i) {
    Uav u;
    u.id = static_cast<int>(i);
    const double col = static_cast<double>(i % cols);
    const double row = static_cast<double>(i / cols);
    u.position = {(col + 0.5) * config.arena_width / static_cast<double>(cols),
                  (row + 0.5) * config.arena_height / static_cast<double>(rows), 0.0};
    u.battery = config.battery_j;
    u.assigned_path = static_cast<int>(i % w.paths.size());
    u.next_waypoint = nearest_waypoint(w.paths[u.assigned_path], u.position);
    u.radar = {config.radar_pri, config.radar_active_fraction, config.radar_range, 0.0};
    u.history.append(u.position);
    u.rng = w.rng.substream(1000 + i);
    w.uavs.push_back(std::move(u));
  }

  for (std::int64_t i = 0; i < config.target_count; ++i) {
    Target t;
    t.id = static_cast<int>(i);
    t.cls = draw_class(w.rng, config.target_mix);
    t.position = {w.rng.uniform(0.0, config.arena_width), w.rng.uniform(0.0, config.arena_height), 0.0};
    const double cap = w.motion[static_cast<int>(t.cls)].speed_cap;
    const double heading = w.rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double speed = w.rng.uniform(0.25 * cap, cap);
    t.vx = speed * std::cos(heading);
    t.vy = speed * std::sin(heading);
    t.history.append(t.position);
    w.targets.push_back(std::move(t));
  }
  return w;
}

void step_targets(World& world) {
  const double next_time = world.time + world.dt;
  for (auto& t : world.targets) {
    const MotionParams& m = world.motion[static_cast<int>(t.cls)];
    if (m.heading_resample_prob > 0.0 && world.rng.uniform() < m.heading_resample_prob) {
      const double speed = std::hypot(t.vx, t.vy);
      const double heading = world.rng.uniform(0.0, 2.0 * std::numbers::pi);
      t.vx = speed * std::cos(heading);
      t.vy = speed * std::sin(heading);
    }
    t.vx += m.sigma * world.rng.normal();
    t.vy += m.sigma * world.rng.normal();
    const double speed = std::hypot(t.vx, t.vy);
    if (speed > m.speed_cap) {
      const double scale = speed > 0.0 ? m.speed_cap / speed : 0.0;
      t.vx *= scale;
      t.vy *= scale;
    }
    t.position.x += t.vx * world.dt;
    t.position.y += t.vy * world.dt;
    reflect(t.position.x, t.vx, world.env.width);
    reflect(t.position.y, t.vy, world.env.height);
    t.position.t = next_time;
    t.history.append(t.position);
  }
}

void draw_energy(Uav& uav, double joules) {
  if (!(joules > 0.0)) return;
  uav.battery -= joules;
  if (uav.battery <= 0.0) {
    uav.battery = 0.0;
    uav.active = false;
  }
}

void step_uav(Uav& uav, const UavCommand& command, const World& world) {
  if (command.path && (*command.path < 0 || static_cast<std::size_t>(*command.path) >= world.paths.size())) {
    throw InvalidAction("unknown sensing path index " + std::to_string(*command.path));
  }
  const double next_time = world.time + world.dt;
  if (uav.active) {
    double cost;
    if (command.path) {
      if (*command.path != uav.assigned_path) {
        uav.assigned_path = *command.path;
        uav.next_waypoint = nearest_waypoint(world.paths[uav.assigned_path], uav.position);
      }
      const auto& wps = world.paths[uav.assigned_path].waypoints;
      double remaining = world.cruise_speed * world.dt;
      // Bounded so a degenerate (zero-length) loop cannot spin forever.
      for (std::size_t guard = 0; remaining > 0.0 && guard < 4 * wps.size() + 4; ++guard) {
        const Waypoint& wp = wps[uav.next_waypoint];
        const double dx = wp.x - uav.position.x;
        const double dy = wp.y - uav.position.y;
        const double d = std::hypot(dx, dy);
        if (d <= remaining) {
          uav.position.x = wp.x;
          uav.position.y = wp.y;
          remaining -= d;
          uav.next_waypoint = (uav.next_waypoint + 1) % wps.size();
        } else {
          uav.position.x += dx * remaining / d;
          uav.position.y += dy * remaining / d;
          remaining = 0.0;
        }
      }
      cost = world.energy.cruise_w * world.dt;
    } else {
      cost = world.energy.idle_w * world.dt;
    }
    uav.radar.advance(world.dt);
    if (uav.radar.active()) cost += world.energy.radar_w * world.dt;
    uav.position.x = std::clamp(uav.position.x, 0.0, world.env.width);
    uav.position.y = std::clamp(uav.position.y, 0.0, world.env.height);
    draw_energy(uav, cost);
  }
  uav.position.t = next_time;
  uav.history.append(uav.position);
}

void advance_world(World& world, std::span<const UavCommand> commands) {
  if (commands.size() != world.uavs.size()) throw InvalidInput("advance_world: one command per UAV required");
  for (std::size_t i = 0; i < world.uavs.size(); ++i) step_uav(world.uavs[i], commands[i], world);
  step_targets(world);
  world.time += world.dt;
  ++world.steps;
}

std::uint64_t world_hash(const World& world) {
  std::uint64_t h = 1469598103934665603ULL;
  hash_bytes(h, world.time);
  hash_bytes(h, world.steps);
  for (const auto& u : world.uavs) {
    hash_bytes(h, u.position.x);
    hash_bytes(h, u.position.y);
    hash_bytes(h, u.battery);
    hash_bytes(h, u.active);
    hash_bytes(h, u.assigned_path);
    hash_bytes(h, u.radar.phase);
    hash_bytes(h, u.history.size());
  }
  for (const auto& t : world.targets) {
    hash_bytes(h, t.position.x);
    hash_bytes(h, t.position.y);
    hash_bytes(h, t.vx);
    hash_bytes(h, t.vy);
    hash_bytes(h, static_cast<int>(t.cls));
    hash_bytes(h, t.history.size());
  }
  return h;
}

nlohmann::ordered_json snapshot_json(const World& world) {
  using nlohmann::ordered_json;
  ordered_json uavs = ordered_json::array();
  for (const auto& u : world.uavs) {
    uavs.push_back(ordered_json{{"id", u.id}, {"x", u.position.x}, {"y", u.position.y}, {"battery", u.battery}});
  }
  ordered_json targets = ordered_json::array();
  for (const auto& t : world.targets) {
    targets.push_back(ordered_json{{"id", t.id}, {"class", to_string(t.cls)}, {"x", t.position.x}, {"y", t.position.y}});
  }
  return ordered_json{{"time", world.time}, {"uavs", std::move(uavs)}, {"targets", std::move(targets)}};
}

}  // namespace adaptnet
