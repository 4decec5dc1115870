#include "adaptnet/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptnet/error.hpp"

namespace adaptnet {

namespace {

double unit(double v, double extent) { return std::clamp(2.0 * v / extent - 1.0, -1.0, 1.0); }

}  // namespace

double mode1_base_reward(const Mode1Events& e, const ScenarioConfig& config) {
  return 1.0 * e.first_detections - config.time_cost - config.duplicate_penalty * e.duplicates;
}

std::vector<double> mode1_rewards(std::span<const Mode1Events> events, const ScenarioConfig& config) {
  std::vector<double> base;
  base.reserve(events.size());
  for (const auto& e : events) base.push_back(mode1_base_reward(e, config));
  if (!config.cooperative || base.empty()) return base;
  const double mean = std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(base.size());
  std::vector<double> out;
  out.reserve(base.size());
  for (double b : base) out.push_back(b + config.coop_weight * mean);
  return out;
}

Mode1Env::Mode1Env(const ScenarioConfig& config)
    : config_(config),
      uavs_(static_cast<std::size_t>(config.uav_count)),
      world_(init_world(config)),
      sensing_(config, uavs_) {}

std::size_t Mode1Env::action_count() const noexcept { return world_.paths.size(); }

std::size_t Mode1Env::observation_dim() const noexcept {
  return 2 + world_.paths.size() + 3 * static_cast<std::size_t>(config_.cluster_k) + 2 * (uavs_ - 1);
}

std::vector<double> Mode1Env::observation(std::size_t u) const {
  const auto& uav = world_.uavs.at(u);
  const double w = world_.env.width;
  const double h = world_.env.height;
  std::vector<double> obs;
  obs.reserve(observation_dim());
  obs.push_back(unit(uav.position.x, w));
  obs.push_back(unit(uav.position.y, h));
  for (std::size_t p = 0; p < world_.paths.size(); ++p) obs.push_back(uav.assigned_path == static_cast<int>(p) ? 1.0 : 0.0);
  const auto& report = sensing_.report();
  std::size_t members = 0;
  for (const auto& c : report) members += c.size;
  for (std::size_t k = 0; k < static_cast<std::size_t>(config_.cluster_k); ++k) {
    if (k < report.size() && members > 0) {
      obs.push_back(std::clamp((report[k].centroid.x - uav.position.x) / w, -1.0, 1.0));
      obs.push_back(std::clamp((report[k].centroid.y - uav.position.y) / h, -1.0, 1.0));
      obs.push_back(static_cast<double>(report[k].size) / static_cast<double>(members));
    } else {
      obs.insert(obs.end(), 3, 0.0);
    }
  }
  for (std::size_t j = 0; j < uavs_; ++j) {
    if (j == u) continue;
    obs.push_back(unit(world_.uavs[j].position.x, w));
    obs.push_back(unit(world_.uavs[j].position.y, h));
  }
  return obs;
}

std::vector<std::vector<double>> Mode1Env::reset(std::uint64_t seed) {
  world_ = init_world(config_, seed);
  sensing_ = SensingNetwork(config_, uavs_);
  steps_ = 0;
  detected_by_.assign(world_.targets.size(), -1);
  entered_step_.assign(world_.targets.size(), -1);
  for (std::size_t t = 0; t < world_.targets.size(); ++t) {
    for (const auto& uav : world_.uavs) {
      if (uav.active && spatial_distance(uav.position, world_.targets[t].position) <= uav.radar.range_max) {
        entered_step_[t] = 0;
        break;
      }
    }
  }
  std::vector<std::vector<double>> obs;
  for (std::size_t u = 0; u < uavs_; ++u) obs.push_back(observation(u));
  return obs;
}

Mode1Env::StepResult Mode1Env::step(std::span<const int> actions) {
  if (actions.size() != uavs_) throw InvalidInput("Mode1Env::step: expected one action per UAV");
  if (detected_by_.size() != world_.targets.size()) throw UsageError("Mode1Env::step: call reset() first");
  std::vector<UavCommand> commands;
  for (int a : actions) {
    if (a < 0 || static_cast<std::size_t>(a) >= world_.paths.size()) {
      throw InvalidAction("Mode1Env::step: path index " + std::to_string(a) + " out of range");
    }
    commands.push_back(UavCommand::follow(a));
  }
  advance_world(world_, commands);
  ++steps_;
  const long now = static_cast<long>(steps_);
  for (std::size_t t = 0; t < world_.targets.size(); ++t) {
    if (entered_step_[t] >= 0) continue;
    for (const auto& uav : world_.uavs) {
      if (uav.active && spatial_distance(uav.position, world_.targets[t].position) <= uav.radar.range_max) {
        entered_step_[t] = now;
        break;
      }
    }
  }
  const auto sensed = sensing_.sense(world_, false);

  StepResult r;
  r.events.resize(uavs_);
  for (std::size_t u = 0; u < uavs_; ++u) {
    for (const auto& d : sensed.detections[u]) {
      if (d.target_id < 0) continue;
      const auto t = static_cast<std::size_t>(d.target_id);
      auto& ev = r.events[u];
      ++ev.detections;
      if (detected_by_[t] < 0) {
        detected_by_[t] = static_cast<int>(u);
        const long latency = entered_step_[t] >= 0 ? now - entered_step_[t] : 0;
        if (latency <= config_.latency_steps) {
          ++ev.first_detections;
        } else {
          ++ev.late_detections;
        }
      } else if (detected_by_[t] != static_cast<int>(u)) {
        ++ev.duplicates;
      }
    }
  }
  for (const auto& e : r.events) r.base_rewards.push_back(mode1_base_reward(e, config_));
  r.rewards = mode1_rewards(r.events, config_);
  const bool all_found = std::all_of(detected_by_.begin(), detected_by_.end(), [](int d) { return d >= 0; });
  r.done = steps_ >= static_cast<std::size_t>(config_.episode_steps) ||
           (config_.mode1_stop_when_all_detected && all_found);
  for (std::size_t u = 0; u < uavs_; ++u) r.observations.push_back(observation(u));
  return r;
}

Mode2Decision decode_mode2_action(std::span<const double> action) {
  if (action.size() != Mode2Env::kActionDim) throw InvalidAction("Mode 2 action must have three entries");
  for (double v : action) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) throw InvalidAction("Mode 2 action entries must lie in [-1, 1]");
  }
  return {action[0] > 0.0, action[1] > 0.0, 0.5 * (action[2] + 1.0)};
}

double mode2_reward(const Mode2Events& e, const ScenarioConfig& config) {
  return config.reward_novel * e.delivered_novel + config.reward_sub_threshold * e.delivered_sub_threshold -
         config.penalty_redundant * e.sent_redundant - e.energy_j / config.energy_norm_j -
         e.avg_aoi / config.aoi_norm_s;
}

Mode2Env::Mode2Env(const ScenarioConfig& config)
    : config_(config),
      uavs_(static_cast<std::size_t>(config.uav_count)),
      world_(init_world(config)),
      sensing_(config, uavs_),
      waveforms_(waveform_set(config)),
      channel_(channel_params(config)) {}

std::size_t Mode2Env::observation_dim() const noexcept {
  return 4 + kActionDim * static_cast<std::size_t>(config_.action_history) + 4;
}

std::vector<double> Mode2Env::observation(std::size_t u) const {
  const auto& uav = world_.uavs.at(u);
  const double w = world_.env.width;
  const double h = world_.env.height;
  std::vector<double> obs;
  obs.reserve(observation_dim());
  obs.push_back(std::clamp(uav.position.x / w, 0.0, 1.0));
  obs.push_back(std::clamp((w - uav.position.x) / w, 0.0, 1.0));
  obs.push_back(std::clamp(uav.position.y / h, 0.0, 1.0));
  obs.push_back(std::clamp((h - uav.position.y) / h, 0.0, 1.0));
  for (const auto& a : history_.at(u)) obs.insert(obs.end(), a.begin(), a.end());
  const auto& q = queues_.at(u);
  const double cap = config_.queue_capacity > 0 ? static_cast<double>(config_.queue_capacity) : 64.0;
  obs.push_back(std::min(1.0, static_cast<double>(q.size()) / cap));
  obs.push_back(std::min(1.0, aoi_.at(u).age(0) / config_.aoi_norm_s));
  obs.push_back(std::clamp(uav.battery / config_.battery_j, 0.0, 1.0));
  double top = -1.0;
  bool any = false;
  auto consider = [&](const Packet& p) {
    top = any ? std::max(top, p.relevance.distance) : p.relevance.distance;
    any = true;
  };
  if (q.in_service()) consider(*q.in_service());
  for (const auto& p : q.waiting()) consider(p);
  obs.push_back(any ? std::clamp(top / config_.frechet_threshold - 1.0, -1.0, 1.0) : -1.0);
  return obs;
}

std::vector<std::vector<double>> Mode2Env::reset(std::uint64_t seed) {
  world_ = init_world(config_, seed);
  sensing_ = SensingNetwork(config_, uavs_);
  const auto discipline = parse_discipline(config_.queue_discipline);
  queues_.assign(uavs_, PacketQueue(discipline, static_cast<std::size_t>(config_.queue_capacity)));
  aoi_.assign(uavs_, AoiTracker(1, world_.time));
  history_.assign(uavs_, std::deque<std::vector<double>>(static_cast<std::size_t>(config_.action_history),
                                                         std::vector<double>(kActionDim, 0.0)));
  link_rng_.clear();
  for (std::size_t u = 0; u < uavs_; ++u) link_rng_.push_back(Rng(mix_seed(seed, 5000 + u)));
  next_packet_ = 0;
  steps_ = 0;
  std::vector<std::vector<double>> obs;
  for (std::size_t u = 0; u < uavs_; ++u) obs.push_back(observation(u));
  return obs;
}

void Mode2Env::enqueue(std::size_t u, const RelevanceScore& score, double size_bits) {
  Packet p;
  p.id = next_packet_++;
  p.source_uav = static_cast<int>(u);
  p.gen_time = world_.time;
  p.size_bits = size_bits;
  p.relevance = score;
  queues_.at(u).enqueue(p, world_.time);
}

void Mode2Env::inject_packet(std::size_t u, const RelevanceScore& score, double size_bits) {
  if (queues_.size() != uavs_) throw UsageError("Mode2Env::inject_packet: call reset() first");
  enqueue(u, score, size_bits);
}

Mode2Env::StepResult Mode2Env::step(std::span<const std::vector<double>> actions) {
  if (actions.size() != uavs_) throw InvalidInput("Mode2Env::step: expected one action per UAV");
  if (queues_.size() != uavs_) throw UsageError("Mode2Env::step: call reset() first");
  std::vector<Mode2Decision> decisions;
  for (const auto& a : actions) decisions.push_back(decode_mode2_action(a));

  StepResult r;
  r.events.resize(uavs_);
  std::vector<std::size_t> dropped_before;
  for (const auto& q : queues_) dropped_before.push_back(q.dropped());

  if (sensing_enabled_) {
    std::vector<UavCommand> commands;
    for (std::size_t u = 0; u < uavs_; ++u) {
      const auto& report = sensing_.uav_report(u);
      commands.push_back(UavCommand::follow(report.empty() ? world_.uavs[u].assigned_path
                                                           : plan_sensing_path(report, world_.paths)));
    }
    advance_world(world_, commands);
    const auto sensed = sensing_.sense(world_, true);
    for (std::size_t u = 0; u < uavs_; ++u) {
      for (const auto& s : sensed.scored[u]) {
        enqueue(u, s.score, s.score.is_novel ? config_.packet_bits_novel : config_.packet_bits_summary);
        ++r.events[u].generated;
      }
    }
  } else {
    std::vector<UavCommand> holds(uavs_, UavCommand::hold());
    advance_world(world_, holds);
  }

  const double now = world_.time;
  const double dt = world_.dt;
  for (std::size_t u = 0; u < uavs_; ++u) {
    auto& ev = r.events[u];
    auto& q = queues_[u];
    auto& uav = world_.uavs[u];
    q.set_priority_weight(decisions[u].priority_weight, config_.frechet_threshold, config_.aoi_norm_s);
    std::vector<Packet> informative;
    if (decisions[u].transmit && !q.idle() && uav.active) {
      const Waveform& wf = decisions[u].high_throughput ? waveforms_.high : waveforms_.low;
      auto served = serve_step(q, wf, world_.env.link_snr(), dt, now, link_rng_[u], channel_);
      ev.energy_j = wf.power_w * dt;
      ev.bits_sent = served.bits_sent;
      draw_energy(uav, ev.energy_j);
      for (auto& p : served.delivered) {
        if (p.relevance.distance > config_.frechet_threshold) {
          ++ev.delivered_novel;
        } else if (p.relevance.distance > 0.0) {
          ++ev.delivered_sub_threshold;
        } else {
          ++ev.sent_redundant;
        }
        if (p.relevance.distance > 0.0) {
          informative.push_back(p);
          informative.back().source_uav = 0;  // per-UAV tracker has a single source
        }
      }
    }
    auto& tracker = aoi_[u];
    const double before = tracker.integral(0);
    tracker.update(informative, now, dt);
    ev.avg_aoi = (tracker.integral(0) - before) / dt;
    ev.dropped = static_cast<int>(q.dropped() - dropped_before[u]);
    r.rewards.push_back(mode2_reward(ev, config_));
    history_[u].pop_front();
    history_[u].push_back(actions[u]);
  }
  ++steps_;
  r.done = steps_ >= static_cast<std::size_t>(config_.episode_steps);
  for (std::size_t u = 0; u < uavs_; ++u) r.observations.push_back(observation(u));
  return r;
}

const char* to_string(Emphasis e) { return e == Emphasis::Sensing ? "SENSING" : "COMMUNICATION"; }

ModeController ModeController::from_config(const ScenarioConfig& config) {
  ModeController c;
  c.window = static_cast<std::size_t>(config.mode_window);
  c.redundancy_threshold = config.mode_redundancy_threshold;
  c.hysteresis = config.mode_hysteresis;
  return c;
}

double ModeController::redundant_fraction() const {
  if (recent_novel.empty()) return 0.0;
  const auto redundant = std::count(recent_novel.begin(), recent_novel.end(), false);
  return static_cast<double>(redundant) / static_cast<double>(recent_novel.size());
}

ModeController mode_switch(ModeController controller, std::span<const RelevanceScore> scores) {
  if (controller.window == 0) throw InvalidInput("mode_switch: window must be >= 1");
  for (const auto& s : scores) {
    controller.recent_novel.push_back(s.is_novel);
    while (controller.recent_novel.size() > controller.window) controller.recent_novel.pop_front();
  }
  if (controller.recent_novel.size() < controller.window) return controller;
  const double f = controller.redundant_fraction();
  if (f > controller.redundancy_threshold + controller.hysteresis) {
    controller.emphasis = Emphasis::Sensing;
  } else if (f < controller.redundancy_threshold - controller.hysteresis) {
    controller.emphasis = Emphasis::Communication;
  }
  return controller;
}

}  // namespace adaptnet
