#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptnet/config.hpp"
#include "adaptnet/radar.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/trajectory.hpp"

namespace adaptnet {

enum class TargetClass { Slow = 0, Fast = 1, Erratic = 2 };

const char* to_string(TargetClass c);

struct MotionParams {
  double speed_cap = 0.0;              ///< m/s
  double sigma = 0.0;                  ///< per-step velocity perturbation, m/s
  double heading_resample_prob = 0.0;  ///< per step
};

struct Target {
  int id = 0;
  TargetClass cls = TargetClass::Slow;
  Point position;
  double vx = 0.0;
  double vy = 0.0;
  Trajectory history;
};

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
};

/// Closed waypoint loop flown at cruise speed.
struct SensingPath {
  std::vector<Waypoint> waypoints;
};

/// The three predefined sensing loops: one horizontal band per third of the arena.
std::vector<SensingPath> default_sensing_paths(double width, double height);

struct EnergyModel {
  double idle_w = 5.0;
  double cruise_w = 120.0;
  double radar_w = 30.0;
};

struct Uav {
  int id = 0;
  Point position;
  double battery = 0.0;  ///< joules
  bool active = true;
  int assigned_path = 0;
  std::size_t next_waypoint = 0;
  RadarState radar;
  Trajectory history;
  Rng rng;  ///< per-UAV substream for scans
};

struct Environment {
  double width = 1000.0;
  double height = 1000.0;
  double sensor_noise_sigma = 2.0;
  double snr_base = 25.0;
  double snr_weather_penalty = 0.0;
  std::uint64_t seed = 0;

  double link_snr() const noexcept { return snr_base - snr_weather_penalty; }
};

/// A UAV motion command: hold position or fly the given predefined path.
struct UavCommand {
  std::optional<int> path;

  static UavCommand hold() { return {}; }
  static UavCommand follow(int index) { return {index}; }
};

struct World {
  double time = 0.0;
  double dt = 0.5;
  std::size_t steps = 0;
  std::vector<Uav> uavs;
  std::vector<Target> targets;
  Environment env;
  std::array<MotionParams, 3> motion{};
  std::vector<SensingPath> paths;
  double cruise_speed = 15.0;
  EnergyModel energy;
  Rng rng;  ///< drives target placement and motion
};

/// UAVs on a deterministic grid; targets placed and classed from Rng(seed).
/// Throws ConfigError for an invalid config.
World init_world(const ScenarioConfig& config);
/// Same world with a different seed (episodic resets).
World init_world(const ScenarioConfig& config, std::uint64_t seed);

/// Advances every target by one dt with class-dependent perturbation and
/// wall reflection; appends the new position to each history. Does not
/// advance world time.
void step_targets(World& world);

/// Moves one UAV for one dt and charges motion and radar energy. Inactive
/// UAVs stay put but still record a history point. Throws InvalidAction for
/// an unknown path index.
void step_uav(Uav& uav, const UavCommand& command, const World& world);

/// Charges extra energy (e.g. transmission) and deactivates on exhaustion.
void draw_energy(Uav& uav, double joules);

/// Steps every UAV with its command, then the targets, then time.
/// `commands` must have one entry per UAV.
void advance_world(World& world, std::span<const UavCommand> commands);

/// FNV-1a over the numeric state; equal worlds hash equally.
std::uint64_t world_hash(const World& world);

/// `{time, uavs:[{id,x,y,battery}], targets:[{id,class,x,y}]}`
nlohmann::ordered_json snapshot_json(const World& world);

}  // namespace adaptnet
