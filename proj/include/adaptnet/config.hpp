#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace adaptnet {

/// Declarative description of one experiment. Every key is optional in the
/// JSON form; omitted keys take the defaults below. Unknown keys are rejected.
struct ScenarioConfig {
  std::uint64_t seed = 7;

  // world
  std::int64_t uav_count = 3;
  std::int64_t target_count = 12;
  std::vector<double> target_mix = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};  // SLOW, FAST, ERRATIC weights
  double arena_width = 1000.0;
  double arena_height = 1000.0;
  double dt = 0.5;
  std::int64_t episode_steps = 200;
  std::int64_t episodes = 2000;
  double slow_speed_cap = 2.0;
  double slow_sigma = 0.1;
  double fast_speed_cap = 12.0;
  double fast_sigma = 0.5;
  double erratic_speed_cap = 6.0;
  double erratic_sigma = 0.3;
  double erratic_heading_prob = 0.1;
  double cruise_speed = 15.0;
  double battery_j = 50000.0;
  double power_idle_w = 5.0;
  double power_cruise_w = 120.0;
  double power_radar_w = 30.0;

  // environment
  double sensor_noise_sigma = 2.0;
  double snr_base_db = 25.0;
  double snr_weather_penalty_db = 0.0;
  double snr_floor_db = 0.0;
  double snr_ref_db = 20.0;

  // radar and tracking
  double radar_pri = 2.0;
  double radar_active_fraction = 0.75;
  double radar_range = 150.0;
  std::string detection_law = "quadratic";  // "quadratic" or "disk"
  double false_alarm_prob = 0.0;
  double gating_radius = 25.0;
  double track_stale_time = 5.0;
  std::int64_t track_min_points = 4;
  std::int64_t track_max_points = 64;

  // relevance and clustering
  double frechet_threshold = 25.0;
  std::int64_t comparison_length = 32;
  std::int64_t cluster_k = 3;
  std::int64_t cluster_refresh_steps = 20;

  // communication
  std::string queue_discipline = "priority";  // fcfs, lcfs_s, lcfs_w, priority
  std::int64_t queue_capacity = 64;
  bool gating = true;
  std::int64_t deferred_batch = 4;
  double packet_bits_novel = 400000.0;
  double packet_bits_summary = 16000.0;
  double high_rate_bps = 10e6;
  double high_power_w = 15.0;
  double low_rate_bps = 2e6;
  double low_power_w = 4.0;
  double channel_erasure_prob = 0.0;

  // learning
  std::vector<std::int64_t> hidden_layers = {128, 256, 128};
  double lr_dqn = 0.01;
  double lr_maddpg = 0.001;
  double gamma_dqn = 0.95;
  double gamma_maddpg = 0.99;
  std::int64_t replay_capacity = 50000;
  std::int64_t batch_size = 64;
  std::int64_t train_every = 1;
  std::int64_t warmup_transitions = 64;
  std::int64_t dqn_sync_every = 100;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;
  double maddpg_tau = 0.01;
  double maddpg_noise_sigma = 0.2;
  double maddpg_noise_decay = 0.999;

  // mode rewards
  bool cooperative = true;
  double coop_weight = 0.5;
  std::int64_t latency_steps = 10;
  double time_cost = 0.01;
  double duplicate_penalty = 0.1;
  double energy_norm_j = 50.0;
  double aoi_norm_s = 20.0;
  double reward_novel = 1.0;
  double reward_sub_threshold = 0.2;
  double penalty_redundant = 0.5;
  std::int64_t action_history = 4;
  bool mode1_stop_when_all_detected = true;
  std::int64_t mode1_decision_steps = 1;  // env steps per DQN decision while training
  std::int64_t mode_window = 20;
  double mode_redundancy_threshold = 0.5;
  double mode_hysteresis = 0.05;

  // experiments
  std::vector<double> aoi_lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double aoi_mu = 1.0;
  double aoi_horizon = 1e6;
  std::vector<std::int64_t> scale_counts = {3, 10, 20, 30};
  std::int64_t scale_steps = 200;
  std::int64_t episode_log_every = 100;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates a JSON document. Throws ConfigError naming the field
/// for parse errors (field "<document>"), unknown keys, wrong types and
/// constraint violations.
ScenarioConfig load_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);

/// Throws ConfigError on the first violated constraint.
void validate(const ScenarioConfig& config);

/// Full document with every key present.
nlohmann::json to_json(const ScenarioConfig& config);
std::string serialize(const ScenarioConfig& config);

}  // namespace adaptnet
