#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adaptnet/mlp.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet {

/// One environment step for every agent, indexed by agent.
struct JointTransition {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> actions;
  std::vector<double> rewards;
  std::vector<std::vector<double>> next_obs;
  bool done = false;
};

struct MaddpgParams {
  std::vector<std::int64_t> hidden{128, 256, 128};
  double lr = 0.001;
  double gamma = 0.99;
  double tau = 0.01;
};

class MaddpgAgent {
 public:
  /// `critic_input` is the sum of all agents' observation and action sizes.
  MaddpgAgent(std::size_t obs_dim, std::size_t action_dim, std::size_t critic_input, const MaddpgParams& params,
              Rng& init);

  /// Actor output; with `explore`, adds N(0, noise_sigma^2) per dimension and
  /// clips to [-1, 1].
  std::vector<double> act(std::span<const double> obs, bool explore, Rng& rng, double noise_sigma) const;

  std::size_t obs_dim() const noexcept { return actor.input_dim(); }
  std::size_t action_dim() const noexcept { return actor.output_dim(); }

  Mlp actor;
  Mlp critic;
  Mlp target_actor;
  Mlp target_critic;
};

struct MaddpgStats {
  std::vector<double> critic_loss;      ///< pre-step mean squared TD error per agent
  std::vector<double> actor_objective;  ///< pre-step mean Q of the actor's own action per agent
};

/// Critic input layout: all observations (agent order), then all actions.
Eigen::MatrixXd critic_input(std::span<const Eigen::MatrixXd> obs, std::span<const Eigen::MatrixXd> actions);

/// TD target for agent i on one transition using the target networks.
double maddpg_td_target(std::span<const MaddpgAgent> agents, std::size_t i, const JointTransition& t, double gamma);

/// Per agent: critic SGD step, actor ascent on Q through its own action
/// channel, then soft target updates for all agents.
MaddpgStats maddpg_update(std::span<MaddpgAgent> agents, std::span<const JointTransition* const> batch,
                          const MaddpgParams& params);

}  // namespace adaptnet
