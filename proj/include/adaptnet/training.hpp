#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <vector>

#include "adaptnet/checkpoint.hpp"
#include "adaptnet/config.hpp"
#include "adaptnet/dqn.hpp"
#include "adaptnet/maddpg.hpp"

namespace adaptnet {

struct EpisodeRecord {
  std::size_t episode = 0;
  std::size_t steps = 0;
  std::vector<double> rewards;  ///< per agent, cumulative training reward
  std::vector<double> losses;   ///< per agent, mean update loss (0 if no update)
  double team_reward = 0.0;     ///< sum over agents of the unshared step rewards
  // event totals over the episode
  long detections = 0;
  long deliveries = 0;
  long drops = 0;
  double energy_j = 0.0;
};

/// One step as written to the episode log.
struct StepRecord {
  std::size_t episode = 0;
  std::size_t step = 0;
  int mode = 1;
  std::vector<double> rewards;
  long detections = 0;
  long deliveries = 0;
  long drops = 0;
  double energy_j = 0.0;
};

struct TrainHooks {
  std::function<void(const EpisodeRecord&)> on_episode;
  /// Called for every step of episodes where episode % log_every == 0.
  std::function<void(const StepRecord&)> on_step;
  std::size_t log_every = 0;  ///< 0 disables step logging
  const std::atomic<bool>* stop = nullptr;
};

struct TrainResult {
  std::vector<EpisodeRecord> episodes;
  Checkpoint checkpoint;
  bool interrupted = false;
};

/// Seed of the world used in training episode `episode`.
std::uint64_t episode_seed(const ScenarioConfig& config, std::size_t episode);

DqnParams dqn_params(const ScenarioConfig& config);
MaddpgParams maddpg_params(const ScenarioConfig& config);

/// DQN agents on Mode1Env. With config.cooperative the agents share
/// rewards and pool their transitions in one replay buffer; otherwise each
/// learns alone from its own reward and experience.
TrainResult train_mode1(const ScenarioConfig& config, const TrainHooks& hooks = {});
/// MADDPG agents on Mode2Env.
TrainResult train_mode2(const ScenarioConfig& config, const TrainHooks& hooks = {});

/// Mean of `values[first, last)`.
double mean_of(const std::vector<double>& values, std::size_t first, std::size_t last);
/// Team rewards of the first and last `fraction` of episodes.
std::pair<double, double> decile_means(const std::vector<EpisodeRecord>& episodes, double fraction = 0.1);

/// Two-player cooperative matrix game: each agent's action is read by sign
/// (> 0 -> 1, else 0) and both receive payoff(a0, a1).
struct MatrixGame {
  std::vector<std::vector<double>> payoff{{1.0, 0.0}, {0.0, 1.0}};

  static int readout(double action) { return action > 0.0 ? 1 : 0; }
  /// Every action pair reaching the maximal payoff, by exhaustive search.
  std::vector<std::pair<int, int>> optima() const;
};

struct MatrixGameResult {
  std::pair<int, int> joint_action;  ///< greedy readout after training
  bool optimal = false;
  std::vector<double> final_actions;
};

/// Single-step episodes with a constant observation. The first
/// `warmup_transitions` episodes act uniformly at random to seed the replay
/// buffer; afterwards actions come from the actors with Gaussian noise.
MatrixGameResult train_matrix_game(const MatrixGame& game, const ScenarioConfig& config, std::size_t episodes,
                                   std::uint64_t seed);

}  // namespace adaptnet
