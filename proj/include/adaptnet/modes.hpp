#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "adaptnet/comms.hpp"
#include "adaptnet/config.hpp"
#include "adaptnet/sensing.hpp"
#include "adaptnet/world.hpp"

namespace adaptnet {

/// Per-UAV event counts behind one Mode 1 step reward.
struct Mode1Events {
  int first_detections = 0;  ///< first detections within the latency budget
  int late_detections = 0;   ///< first detections outside the budget (unrewarded)
  int duplicates = 0;        ///< detections of a target first detected by another UAV
  int detections = 0;        ///< all true-target detections this step
};

/// +reward per timely first detection, -time_cost, -duplicate_penalty per duplicate.
double mode1_base_reward(const Mode1Events& e, const ScenarioConfig& config);
/// base_i + coop_weight * mean(base) when cooperative, base_i otherwise.
std::vector<double> mode1_rewards(std::span<const Mode1Events> events, const ScenarioConfig& config);

/// Sensing-prioritised environment: every UAV picks one of the predefined
/// sensing paths each step.
class Mode1Env {
 public:
  explicit Mode1Env(const ScenarioConfig& config);

  struct StepResult {
    std::vector<std::vector<double>> observations;
    std::vector<double> rewards;       ///< as used for training (shaped when cooperative)
    std::vector<double> base_rewards;  ///< per-UAV rewards before sharing
    std::vector<Mode1Events> events;
    bool done = false;
  };

  std::vector<std::vector<double>> reset(std::uint64_t seed);
  /// One action (path index) per UAV. Throws InvalidInput on a count
  /// mismatch and InvalidAction on an unknown path.
  StepResult step(std::span<const int> actions);

  std::size_t agent_count() const noexcept { return uavs_; }
  std::size_t action_count() const noexcept;
  std::size_t observation_dim() const noexcept;
  std::vector<double> observation(std::size_t uav) const;

  const World& world() const noexcept { return world_; }
  /// For test fixtures; call after reset().
  World& mutable_world() noexcept { return world_; }
  const SensingNetwork& sensing() const noexcept { return sensing_; }
  const ScenarioConfig& config() const noexcept { return config_; }
  std::size_t steps() const noexcept { return steps_; }
  /// -1 until first detected.
  int detected_by(std::size_t target) const { return detected_by_.at(target); }

 private:
  ScenarioConfig config_;
  std::size_t uavs_;
  World world_;
  SensingNetwork sensing_;
  std::vector<int> detected_by_;
  std::vector<long> entered_step_;  ///< -1 until the target first enters any radar range
  std::size_t steps_ = 0;
};

/// Decoded continuous Mode 2 action.
struct Mode2Decision {
  bool high_throughput = false;
  bool transmit = false;
  double priority_weight = 0.5;  ///< in [0, 1]
};

/// Throws InvalidAction unless `action` has three finite entries in [-1, 1].
Mode2Decision decode_mode2_action(std::span<const double> action);

struct Mode2Events {
  int delivered_novel = 0;
  int delivered_sub_threshold = 0;
  int sent_redundant = 0;
  int generated = 0;
  int dropped = 0;
  double energy_j = 0.0;
  double bits_sent = 0.0;
  double avg_aoi = 0.0;  ///< mean age over the step
};

double mode2_reward(const Mode2Events& e, const ScenarioConfig& config);

/// Communication-prioritised environment: UAVs fly the scripted planner and
/// each agent controls its uplink (waveform, transmit gate, queue priority).
/// While the gate is open and the queue holds traffic the radio is keyed for
/// the whole step at the selected waveform's power.
class Mode2Env {
 public:
  explicit Mode2Env(const ScenarioConfig& config);

  struct StepResult {
    std::vector<std::vector<double>> observations;
    std::vector<double> rewards;
    std::vector<Mode2Events> events;
    bool done = false;
  };

  static constexpr std::size_t kActionDim = 3;

  std::vector<std::vector<double>> reset(std::uint64_t seed);
  /// One 3-vector per UAV. Throws InvalidInput on a count mismatch.
  StepResult step(std::span<const std::vector<double>> actions);

  std::size_t agent_count() const noexcept { return uavs_; }
  std::size_t observation_dim() const noexcept;
  std::vector<double> observation(std::size_t uav) const;

  /// Test hook: queue a packet as if it had been sensed now.
  void inject_packet(std::size_t uav, const RelevanceScore& score, double size_bits);
  /// Test hook: turn sensing off so only injected traffic exists.
  void set_sensing_enabled(bool enabled) noexcept { sensing_enabled_ = enabled; }

  const World& world() const noexcept { return world_; }
  World& mutable_world() noexcept { return world_; }
  const PacketQueue& queue(std::size_t uav) const { return queues_.at(uav); }
  const AoiTracker& aoi(std::size_t uav) const { return aoi_.at(uav); }
  const ScenarioConfig& config() const noexcept { return config_; }
  std::size_t steps() const noexcept { return steps_; }

 private:
  void enqueue(std::size_t uav, const RelevanceScore& score, double size_bits);

  ScenarioConfig config_;
  std::size_t uavs_;
  World world_;
  SensingNetwork sensing_;
  WaveformSet waveforms_;
  ChannelParams channel_;
  std::vector<PacketQueue> queues_;
  std::vector<AoiTracker> aoi_;
  std::vector<std::deque<std::vector<double>>> history_;
  std::vector<Rng> link_rng_;
  std::uint64_t next_packet_ = 0;
  std::size_t steps_ = 0;
  bool sensing_enabled_ = true;
};

enum class Emphasis { Sensing, Communication };

const char* to_string(Emphasis e);

struct ModeController {
  std::size_t window = 20;
  double redundancy_threshold = 0.5;
  double hysteresis = 0.05;
  Emphasis emphasis = Emphasis::Sensing;
  std::deque<bool> recent_novel;

  static ModeController from_config(const ScenarioConfig& config);
  /// Share of non-novel scores in the window (0 when empty).
  double redundant_fraction() const;
};

/// Pushes the scores into the window (oldest evicted). Once the window is
/// full: fraction > threshold + hysteresis -> SENSING, fraction < threshold -
/// hysteresis -> COMMUNICATION, otherwise unchanged.
ModeController mode_switch(ModeController controller, std::span<const RelevanceScore> scores);

}  // namespace adaptnet
