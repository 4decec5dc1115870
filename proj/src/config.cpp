#include "adaptnet/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adaptnet/error.hpp"

namespace adaptnet {

namespace {

using nlohmann::json;

// Lists every config field once; used for parsing, serialization and the
// unknown-key check so the three can never drift apart.
template <class Config, class Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("seed", c.seed);
  v("uav_count", c.uav_count);
  v("target_count", c.target_count);
  v("target_mix", c.target_mix);
  v("arena_width", c.arena_width);
  v("arena_height", c.arena_height);
  v("dt", c.dt);
  v("episode_steps", c.episode_steps);
  v("episodes", c.episodes);
  v("slow_speed_cap", c.slow_speed_cap);
  v("slow_sigma", c.slow_sigma);
  v("fast_speed_cap", c.fast_speed_cap);
  v("fast_sigma", c.fast_sigma);
  v("erratic_speed_cap", c.erratic_speed_cap);
  v("erratic_sigma", c.erratic_sigma);
  v("erratic_heading_prob", c.erratic_heading_prob);
  v("cruise_speed", c.cruise_speed);
  v("battery_j", c.battery_j);
  v("power_idle_w", c.power_idle_w);
  v("power_cruise_w", c.power_cruise_w);
  v("power_radar_w", c.power_radar_w);
  v("sensor_noise_sigma", c.sensor_noise_sigma);
  v("snr_base_db", c.snr_base_db);
  v("snr_weather_penalty_db", c.snr_weather_penalty_db);
  v("snr_floor_db", c.snr_floor_db);
  v("snr_ref_db", c.snr_ref_db);
  v("radar_pri", c.radar_pri);
  v("radar_active_fraction", c.radar_active_fraction);
  v("radar_range", c.radar_range);
  v("detection_law", c.detection_law);
  v("false_alarm_prob", c.false_alarm_prob);
  v("gating_radius", c.gating_radius);
  v("track_stale_time", c.track_stale_time);
  v("track_min_points", c.track_min_points);
  v("track_max_points", c.track_max_points);
  v("frechet_threshold", c.frechet_threshold);
  v("comparison_length", c.comparison_length);
  v("cluster_k", c.cluster_k);
  v("cluster_refresh_steps", c.cluster_refresh_steps);
  v("queue_discipline", c.queue_discipline);
  v("queue_capacity", c.queue_capacity);
  v("gating", c.gating);
  v("deferred_batch", c.deferred_batch);
  v("packet_bits_novel", c.packet_bits_novel);
  v("packet_bits_summary", c.packet_bits_summary);
  v("high_rate_bps", c.high_rate_bps);
  v("high_power_w", c.high_power_w);
  v("low_rate_bps", c.low_rate_bps);
  v("low_power_w", c.low_power_w);
  v("channel_erasure_prob", c.channel_erasure_prob);
  v("hidden_layers", c.hidden_layers);
  v("lr_dqn", c.lr_dqn);
  v("lr_maddpg", c.lr_maddpg);
  v("gamma_dqn", c.gamma_dqn);
  v("gamma_maddpg", c.gamma_maddpg);
  v("replay_capacity", c.replay_capacity);
  v("batch_size", c.batch_size);
  v("train_every", c.train_every);
  v("warmup_transitions", c.warmup_transitions);
  v("dqn_sync_every", c.dqn_sync_every);
  v("epsilon_start", c.epsilon_start);
  v("epsilon_end", c.epsilon_end);
  v("epsilon_decay_fraction", c.epsilon_decay_fraction);
  v("maddpg_tau", c.maddpg_tau);
  v("maddpg_noise_sigma", c.maddpg_noise_sigma);
  v("maddpg_noise_decay", c.maddpg_noise_decay);
  v("cooperative", c.cooperative);
  v("coop_weight", c.coop_weight);
  v("latency_steps", c.latency_steps);
  v("time_cost", c.time_cost);
  v("duplicate_penalty", c.duplicate_penalty);
  v("energy_norm_j", c.energy_norm_j);
  v("aoi_norm_s", c.aoi_norm_s);
  v("reward_novel", c.reward_novel);
  v("reward_sub_threshold", c.reward_sub_threshold);
  v("penalty_redundant", c.penalty_redundant);
  v("action_history", c.action_history);
  v("mode1_stop_when_all_detected", c.mode1_stop_when_all_detected);
  v("mode1_decision_steps", c.mode1_decision_steps);
  v("mode_window", c.mode_window);
  v("mode_redundancy_threshold", c.mode_redundancy_threshold);
  v("mode_hysteresis", c.mode_hysteresis);
  v("aoi_lambdas", c.aoi_lambdas);
  v("aoi_mu", c.aoi_mu);
  v("aoi_horizon", c.aoi_horizon);
  v("scale_counts", c.scale_counts);
  v("scale_steps", c.scale_steps);
  v("episode_log_every", c.episode_log_every);
}

void read_value(const json& j, const std::string& key, std::uint64_t& out) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  out = j.get<std::uint64_t>();
}

void read_value(const json& j, const std::string& key, std::int64_t& out) {
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  out = j.get<std::int64_t>();
}

void read_value(const json& j, const std::string& key, double& out) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  out = j.get<double>();
}

void read_value(const json& j, const std::string& key, bool& out) {
  if (!j.is_boolean()) throw ConfigError(key, "expected a boolean");
  out = j.get<bool>();
}

void read_value(const json& j, const std::string& key, std::string& out) {
  if (!j.is_string()) throw ConfigError(key, "expected a string");
  out = j.get<std::string>();
}

template <class T>
void read_value(const json& j, const std::string& key, std::vector<T>& out) {
  if (!j.is_array()) throw ConfigError(key, "expected an array");
  std::vector<T> values;
  for (const auto& item : j) {
    T v{};
    read_value(item, key, v);
    values.push_back(v);
  }
  out = std::move(values);
}

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ConfigError(field, message);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }
bool probability(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const ScenarioConfig& c) {
  require(c.uav_count >= 1, "uav_count", "must be >= 1");
  require(c.target_count >= 1, "target_count", "must be >= 1");
  require(c.target_mix.size() == 3, "target_mix", "must have 3 weights (slow, fast, erratic)");
  double mix_total = 0.0;
  for (double w : c.target_mix) {
    require(finite_nonnegative(w), "target_mix", "weights must be non-negative");
    mix_total += w;
  }
  require(mix_total > 0.0, "target_mix", "weights must not all be zero");
  require(finite_positive(c.arena_width), "arena_width", "must be > 0");
  require(finite_positive(c.arena_height), "arena_height", "must be > 0");
  require(finite_positive(c.dt), "dt", "must be > 0");
  require(c.episode_steps >= 1, "episode_steps", "must be >= 1");
  require(c.episodes >= 1, "episodes", "must be >= 1");
  require(finite_nonnegative(c.slow_speed_cap), "slow_speed_cap", "must be >= 0");
  require(finite_nonnegative(c.slow_sigma), "slow_sigma", "must be >= 0");
  require(finite_nonnegative(c.fast_speed_cap), "fast_speed_cap", "must be >= 0");
  require(finite_nonnegative(c.fast_sigma), "fast_sigma", "must be >= 0");
  require(finite_nonnegative(c.erratic_speed_cap), "erratic_speed_cap", "must be >= 0");
  require(finite_nonnegative(c.erratic_sigma), "erratic_sigma", "must be >= 0");
  require(probability(c.erratic_heading_prob), "erratic_heading_prob", "must be in [0, 1]");
  require(finite_positive(c.cruise_speed), "cruise_speed", "must be > 0");
  require(finite_positive(c.battery_j), "battery_j", "must be > 0");
  require(finite_nonnegative(c.power_idle_w), "power_idle_w", "must be >= 0");
  require(finite_nonnegative(c.power_cruise_w), "power_cruise_w", "must be >= 0");
  require(finite_nonnegative(c.power_radar_w), "power_radar_w", "must be >= 0");
  require(finite_nonnegative(c.sensor_noise_sigma), "sensor_noise_sigma", "must be >= 0");
  require(std::isfinite(c.snr_base_db), "snr_base_db", "must be finite");
  require(finite_nonnegative(c.snr_weather_penalty_db), "snr_weather_penalty_db", "must be >= 0");
  require(std::isfinite(c.snr_floor_db), "snr_floor_db", "must be finite");
  require(std::isfinite(c.snr_ref_db) && c.snr_ref_db > c.snr_floor_db, "snr_ref_db", "must exceed snr_floor_db");
  require(finite_positive(c.radar_pri), "radar_pri", "must be > 0");
  require(c.radar_active_fraction > 0.0 && c.radar_active_fraction <= 1.0, "radar_active_fraction",
          "must be in (0, 1]");
  require(finite_positive(c.radar_range), "radar_range", "must be > 0");
  require(c.detection_law == "quadratic" || c.detection_law == "disk", "detection_law",
          "must be 'quadratic' or 'disk'");
  require(probability(c.false_alarm_prob), "false_alarm_prob", "must be in [0, 1]");
  require(finite_positive(c.gating_radius), "gating_radius", "must be > 0");
  require(finite_positive(c.track_stale_time), "track_stale_time", "must be > 0");
  require(c.track_min_points >= 2, "track_min_points", "must be >= 2");
  require(c.track_max_points >= c.track_min_points, "track_max_points", "must be >= track_min_points");
  require(finite_positive(c.frechet_threshold), "frechet_threshold", "must be > 0");
  require(c.comparison_length >= 2, "comparison_length", "must be >= 2");
  require(c.cluster_k >= 1, "cluster_k", "must be >= 1");
  require(c.cluster_refresh_steps >= 1, "cluster_refresh_steps", "must be >= 1");
  require(c.queue_discipline == "fcfs" || c.queue_discipline == "lcfs_s" || c.queue_discipline == "lcfs_w" ||
              c.queue_discipline == "priority",
          "queue_discipline", "must be one of fcfs, lcfs_s, lcfs_w, priority");
  require(c.queue_capacity >= 0, "queue_capacity", "must be >= 0 (0 = unbounded)");
  require(c.deferred_batch >= 1, "deferred_batch", "must be >= 1");
  require(finite_positive(c.packet_bits_novel), "packet_bits_novel", "must be > 0");
  require(finite_positive(c.packet_bits_summary), "packet_bits_summary", "must be > 0");
  require(finite_positive(c.low_rate_bps), "low_rate_bps", "must be > 0");
  require(finite_positive(c.low_power_w), "low_power_w", "must be > 0");
  require(finite_positive(c.high_rate_bps) && c.high_rate_bps > c.low_rate_bps, "high_rate_bps",
          "must exceed low_rate_bps");
  require(finite_positive(c.high_power_w) && c.high_power_w > c.low_power_w, "high_power_w",
          "must exceed low_power_w");
  require(c.channel_erasure_prob >= 0.0 && c.channel_erasure_prob < 1.0, "channel_erasure_prob",
          "must be in [0, 1)");
  require(!c.hidden_layers.empty(), "hidden_layers", "must list at least one hidden layer");
  for (auto h : c.hidden_layers) require(h >= 1, "hidden_layers", "sizes must be >= 1");
  require(finite_positive(c.lr_dqn), "lr_dqn", "must be > 0");
  require(finite_positive(c.lr_maddpg), "lr_maddpg", "must be > 0");
  require(c.gamma_dqn >= 0.0 && c.gamma_dqn < 1.0, "gamma_dqn", "must be in [0, 1)");
  require(c.gamma_maddpg >= 0.0 && c.gamma_maddpg < 1.0, "gamma_maddpg", "must be in [0, 1)");
  require(c.replay_capacity >= 1, "replay_capacity", "must be >= 1");
  require(c.batch_size >= 1, "batch_size", "must be >= 1");
  require(c.train_every >= 1, "train_every", "must be >= 1");
  require(c.warmup_transitions >= 1, "warmup_transitions", "must be >= 1");
  require(c.dqn_sync_every >= 1, "dqn_sync_every", "must be >= 1");
  require(probability(c.epsilon_end), "epsilon_end", "must be in [0, 1]");
  require(probability(c.epsilon_start) && c.epsilon_start >= c.epsilon_end, "epsilon_start",
          "must be in [epsilon_end, 1]");
  require(c.epsilon_decay_fraction > 0.0 && c.epsilon_decay_fraction <= 1.0, "epsilon_decay_fraction",
          "must be in (0, 1]");
  require(c.maddpg_tau > 0.0 && c.maddpg_tau <= 1.0, "maddpg_tau", "must be in (0, 1]");
  require(finite_nonnegative(c.maddpg_noise_sigma), "maddpg_noise_sigma", "must be >= 0");
  require(c.maddpg_noise_decay > 0.0 && c.maddpg_noise_decay <= 1.0, "maddpg_noise_decay", "must be in (0, 1]");
  require(finite_nonnegative(c.coop_weight), "coop_weight", "must be >= 0");
  require(c.latency_steps >= 0, "latency_steps", "must be >= 0");
  require(finite_nonnegative(c.time_cost), "time_cost", "must be >= 0");
  require(finite_nonnegative(c.duplicate_penalty), "duplicate_penalty", "must be >= 0");
  require(finite_positive(c.energy_norm_j), "energy_norm_j", "must be > 0");
  require(finite_positive(c.aoi_norm_s), "aoi_norm_s", "must be > 0");
  require(std::isfinite(c.reward_novel), "reward_novel", "must be finite");
  require(std::isfinite(c.reward_sub_threshold), "reward_sub_threshold", "must be finite");
  require(finite_nonnegative(c.penalty_redundant), "penalty_redundant", "must be >= 0");
  require(c.action_history >= 1, "action_history", "must be >= 1");
  require(c.mode1_decision_steps >= 1, "mode1_decision_steps", "must be >= 1");
  require(c.mode_window >= 1, "mode_window", "must be >= 1");
  require(c.mode_redundancy_threshold > 0.0 && c.mode_redundancy_threshold < 1.0, "mode_redundancy_threshold",
          "must be in (0, 1)");
  require(finite_nonnegative(c.mode_hysteresis), "mode_hysteresis", "must be >= 0");
  require(!c.aoi_lambdas.empty(), "aoi_lambdas", "must not be empty");
  for (double l : c.aoi_lambdas) require(finite_positive(l), "aoi_lambdas", "rates must be > 0");
  require(finite_positive(c.aoi_mu), "aoi_mu", "must be > 0");
  require(finite_positive(c.aoi_horizon), "aoi_horizon", "must be > 0");
  require(!c.scale_counts.empty(), "scale_counts", "must not be empty");
  for (auto n : c.scale_counts) require(n >= 1, "scale_counts", "counts must be >= 1");
  require(c.scale_steps >= 1, "scale_steps", "must be >= 1");
  require(c.episode_log_every >= 0, "episode_log_every", "must be >= 0 (0 disables)");
}

ScenarioConfig load_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "top level must be a JSON object");

  ScenarioConfig config;
  std::set<std::string> known;
  visit_fields(config, [&](const char* name, auto& field) {
    known.insert(name);
    if (auto it = doc.find(name); it != doc.end()) read_value(*it, name, field);
  });
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) throw ConfigError(item.key(), "unknown key");
  }
  validate(config);
  return config;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<document>", "cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str());
}

json to_json(const ScenarioConfig& config) {
  json doc = json::object();
  visit_fields(config, [&](const char* name, const auto& field) { doc[name] = field; });
  return doc;
}

std::string serialize(const ScenarioConfig& config) { return to_json(config).dump(2); }

}  // namespace adaptnet
