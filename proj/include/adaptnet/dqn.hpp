#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adaptnet/mlp.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet {

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

struct DqnParams {
  std::vector<std::int64_t> hidden{128, 256, 128};
  double lr = 0.01;
  double gamma = 0.95;
  std::size_t sync_every = 100;
  double epsilon_min = 0.05;
};

class DqnAgent {
 public:
  /// Networks start from `init` (online and target identical).
  DqnAgent(std::size_t obs_dim, std::size_t action_count, const DqnParams& params, Rng& init);
  /// Zero-initialised networks.
  DqnAgent(std::size_t obs_dim, std::size_t action_count, const DqnParams& params);

  /// Epsilon-greedy when exploring, greedy otherwise.
  int act(std::span<const double> obs, bool explore, Rng& rng) const;
  /// argmax_a Q(obs, a); ties go to the lowest index.
  int greedy(std::span<const double> obs) const;
  std::vector<double> q_values(std::span<const double> obs) const;

  /// r + (1 - done) * gamma * max_a' Q_target(s', a')
  double td_target(const Transition& t) const;

  /// One SGD step on the mean squared TD error. Returns the loss evaluated
  /// with the updated parameters. Syncs the target every `sync_every` calls.
  double update(std::span<const Transition* const> batch);

  double epsilon() const noexcept { return epsilon_; }
  void set_epsilon(double eps);
  std::size_t obs_dim() const noexcept { return online_.input_dim(); }
  std::size_t action_count() const noexcept { return online_.output_dim(); }
  std::size_t updates() const noexcept { return updates_; }
  const DqnParams& params() const noexcept { return params_; }

  Mlp& online() noexcept { return online_; }
  const Mlp& online() const noexcept { return online_; }
  Mlp& target() noexcept { return target_; }
  const Mlp& target() const noexcept { return target_; }

 private:
  DqnParams params_;
  Mlp online_;
  Mlp target_;
  double epsilon_ = 1.0;
  std::size_t updates_ = 0;
};

/// Linear decay from `start` to `end` over the first `fraction` of episodes.
double epsilon_schedule(std::size_t episode, std::size_t episodes, double start, double end, double fraction);

}  // namespace adaptnet
