#include "adaptnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptnet/error.hpp"
#include "adaptnet/modes.hpp"
#include "adaptnet/replay.hpp"

namespace adaptnet {

std::uint64_t episode_seed(const ScenarioConfig& config, std::size_t episode) {
  return mix_seed(config.seed, 1'000'000 + episode);
}

DqnParams dqn_params(const ScenarioConfig& config) {
  DqnParams p;
  p.hidden = config.hidden_layers;
  p.lr = config.lr_dqn;
  p.gamma = config.gamma_dqn;
  p.sync_every = static_cast<std::size_t>(config.dqn_sync_every);
  p.epsilon_min = std::min(config.epsilon_end, config.epsilon_start);
  return p;
}

MaddpgParams maddpg_params(const ScenarioConfig& config) {
  MaddpgParams p;
  p.hidden = config.hidden_layers;
  p.lr = config.lr_maddpg;
  p.gamma = config.gamma_maddpg;
  p.tau = config.maddpg_tau;
  return p;
}

double mean_of(const std::vector<double>& values, std::size_t first, std::size_t last) {
  if (last <= first || last > values.size()) throw InvalidInput("mean_of: empty or out-of-range slice");
  return std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(first),
                         values.begin() + static_cast<std::ptrdiff_t>(last), 0.0) /
         static_cast<double>(last - first);
}

std::pair<double, double> decile_means(const std::vector<EpisodeRecord>& episodes, double fraction) {
  std::vector<double> team;
  for (const auto& e : episodes) team.push_back(e.team_reward);
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(team.size())));
  if (team.size() < n) throw InvalidInput("decile_means: not enough episodes");
  return {mean_of(team, 0, n), mean_of(team, team.size() - n, team.size())};
}

namespace {

bool stopped(const TrainHooks& hooks) { return hooks.stop && hooks.stop->load(); }

}  // namespace

TrainResult train_mode1(const ScenarioConfig& config, const TrainHooks& hooks) {
  Mode1Env env(config);
  const std::size_t n = env.agent_count();
  const auto params = dqn_params(config);
  Rng init(mix_seed(config.seed, 11));
  Rng rng(mix_seed(config.seed, 12));
  std::vector<DqnAgent> agents;
  for (std::size_t i = 0; i < n; ++i) agents.emplace_back(env.observation_dim(), env.action_count(), params, init);
  // Cooperative agents pool their experience in one buffer.
  const bool pooled = config.cooperative;
  std::vector<ReplayBuffer<Transition>> buffers(pooled ? 1 : n,
                                                ReplayBuffer<Transition>(static_cast<std::size_t>(config.replay_capacity)));
  auto buffer_of = [&](std::size_t i) -> ReplayBuffer<Transition>& { return buffers[pooled ? 0 : i]; };
  const auto episodes = static_cast<std::size_t>(config.episodes);
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const auto train_every = static_cast<std::size_t>(config.train_every);
  const auto warmup = static_cast<std::size_t>(std::max<std::int64_t>(config.warmup_transitions, 1));
  const auto decision_steps = static_cast<std::size_t>(config.mode1_decision_steps);

  TrainResult result;
  std::size_t total_steps = 0;
  std::vector<int> actions(n);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    if (stopped(hooks)) {
      result.interrupted = true;
      break;
    }
    const double eps =
        epsilon_schedule(ep, episodes, config.epsilon_start, config.epsilon_end, config.epsilon_decay_fraction);
    for (auto& a : agents) a.set_epsilon(eps);
    auto obs = env.reset(episode_seed(config, ep));
    EpisodeRecord rec;
    rec.episode = ep;
    rec.rewards.assign(n, 0.0);
    rec.losses.assign(n, 0.0);
    std::vector<std::size_t> loss_count(n, 0);
    const bool log = hooks.on_step && hooks.log_every > 0 && ep % hooks.log_every == 0;
    bool done = false;
    std::vector<double> held(n, 0.0);
    std::size_t since = 0;
    while (!done) {
      if (since == 0) {
        for (std::size_t i = 0; i < n; ++i) actions[i] = agents[i].act(obs[i], true, rng);
      }
      auto step = env.step(actions);
      done = step.done;
      ++since;
      for (std::size_t i = 0; i < n; ++i) {
        held[i] += step.rewards[i];
        rec.rewards[i] += step.rewards[i];
        rec.team_reward += step.base_rewards[i];
        rec.detections += step.events[i].detections;
      }
      if (done || since == decision_steps) {
        for (std::size_t i = 0; i < n; ++i) {
          buffer_of(i).push({std::move(obs[i]), actions[i], held[i], step.observations[i], step.done});
        }
        obs = std::move(step.observations);
        std::fill(held.begin(), held.end(), 0.0);
        since = 0;
      }
      ++total_steps;
      ++rec.steps;
      if (total_steps % train_every == 0) {
        for (std::size_t i = 0; i < n; ++i) {
          if (buffer_of(i).size() < warmup) continue;
          const auto sample = buffer_of(i).sample(batch, rng);
          rec.losses[i] += agents[i].update(sample);
          ++loss_count[i];
        }
      }
      if (log) {
        StepRecord s{ep, rec.steps, 1, step.rewards, 0, 0, 0, 0.0};
        for (const auto& e : step.events) s.detections += e.detections;
        hooks.on_step(s);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (loss_count[i] > 0) rec.losses[i] /= static_cast<double>(loss_count[i]);
    }
    if (hooks.on_episode) hooks.on_episode(rec);
    result.episodes.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.checkpoint.networks.emplace("dqn_" + std::to_string(i) + "_online", agents[i].online());
    result.checkpoint.networks.emplace("dqn_" + std::to_string(i) + "_target", agents[i].target());
  }
  result.checkpoint.rng_state = rng.save_state();
  result.checkpoint.episode = static_cast<long long>(result.episodes.size());
  return result;
}

TrainResult train_mode2(const ScenarioConfig& config, const TrainHooks& hooks) {
  Mode2Env env(config);
  const std::size_t n = env.agent_count();
  const auto params = maddpg_params(config);
  Rng init(mix_seed(config.seed, 21));
  Rng rng(mix_seed(config.seed, 22));
  const std::size_t obs_dim = env.observation_dim();
  const std::size_t critic_in = n * (obs_dim + Mode2Env::kActionDim);
  std::vector<MaddpgAgent> agents;
  for (std::size_t i = 0; i < n; ++i) agents.emplace_back(obs_dim, Mode2Env::kActionDim, critic_in, params, init);
  ReplayBuffer<JointTransition> buffer(static_cast<std::size_t>(config.replay_capacity));
  const auto episodes = static_cast<std::size_t>(config.episodes);
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const auto train_every = static_cast<std::size_t>(config.train_every);
  const auto warmup = static_cast<std::size_t>(std::max<std::int64_t>(config.warmup_transitions, 1));

  TrainResult result;
  std::size_t total_steps = 0;
  double sigma = config.maddpg_noise_sigma;
  std::vector<std::vector<double>> actions(n);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    if (stopped(hooks)) {
      result.interrupted = true;
      break;
    }
    auto obs = env.reset(episode_seed(config, ep));
    EpisodeRecord rec;
    rec.episode = ep;
    rec.rewards.assign(n, 0.0);
    rec.losses.assign(n, 0.0);
    std::size_t updates = 0;
    const bool log = hooks.on_step && hooks.log_every > 0 && ep % hooks.log_every == 0;
    bool done = false;
    while (!done) {
      for (std::size_t i = 0; i < n; ++i) actions[i] = agents[i].act(obs[i], true, rng, sigma);
      auto step = env.step(actions);
      done = step.done;
      JointTransition t;
      t.obs = std::move(obs);
      t.actions = actions;
      t.rewards = step.rewards;
      t.next_obs = step.observations;
      t.done = step.done;
      buffer.push(std::move(t));
      StepRecord s{ep, rec.steps + 1, 2, step.rewards, 0, 0, 0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        const auto& e = step.events[i];
        rec.rewards[i] += step.rewards[i];
        rec.team_reward += step.rewards[i];
        s.deliveries += e.delivered_novel + e.delivered_sub_threshold + e.sent_redundant;
        s.drops += e.dropped;
        s.energy_j += e.energy_j;
      }
      rec.deliveries += s.deliveries;
      rec.drops += s.drops;
      rec.energy_j += s.energy_j;
      obs = std::move(step.observations);
      ++total_steps;
      ++rec.steps;
      if (total_steps % train_every == 0 && buffer.size() >= warmup) {
        const auto sample = buffer.sample(batch, rng);
        const auto stats = maddpg_update(agents, sample, params);
        for (std::size_t i = 0; i < n; ++i) rec.losses[i] += stats.critic_loss[i];
        ++updates;
      }
      if (log) hooks.on_step(s);
    }
    if (updates > 0) {
      for (auto& l : rec.losses) l /= static_cast<double>(updates);
    }
    sigma *= config.maddpg_noise_decay;
    if (hooks.on_episode) hooks.on_episode(rec);
    result.episodes.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = std::to_string(i);
    result.checkpoint.networks.emplace("maddpg_" + id + "_actor", agents[i].actor);
    result.checkpoint.networks.emplace("maddpg_" + id + "_critic", agents[i].critic);
    result.checkpoint.networks.emplace("maddpg_" + id + "_target_actor", agents[i].target_actor);
    result.checkpoint.networks.emplace("maddpg_" + id + "_target_critic", agents[i].target_critic);
  }
  result.checkpoint.rng_state = rng.save_state();
  result.checkpoint.episode = static_cast<long long>(result.episodes.size());
  return result;
}

std::vector<std::pair<int, int>> MatrixGame::optima() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : payoff) {
    for (double v : row) best = std::max(best, v);
  }
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < payoff.size(); ++a) {
    for (std::size_t b = 0; b < payoff[a].size(); ++b) {
      if (payoff[a][b] == best) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return out;
}

MatrixGameResult train_matrix_game(const MatrixGame& game, const ScenarioConfig& config, std::size_t episodes,
                                   std::uint64_t seed) {
  if (game.payoff.size() != 2 || game.payoff[0].size() != 2 || game.payoff[1].size() != 2) {
    throw InvalidInput("train_matrix_game: payoff must be 2x2");
  }
  const auto params = maddpg_params(config);
  Rng init(mix_seed(seed, 31));
  Rng rng(mix_seed(seed, 32));
  const std::vector<double> obs{1.0};
  std::vector<MaddpgAgent> agents;
  for (int i = 0; i < 2; ++i) agents.emplace_back(1, 1, 4, params, init);
  ReplayBuffer<JointTransition> buffer(static_cast<std::size_t>(config.replay_capacity));
  const auto warmup = static_cast<std::size_t>(std::max<std::int64_t>(config.warmup_transitions, 1));
  const auto batch = static_cast<std::size_t>(config.batch_size);
  double sigma = config.maddpg_noise_sigma;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    JointTransition t;
    for (auto& ag : agents) {
      t.obs.push_back(obs);
      t.next_obs.push_back(obs);
      t.actions.push_back(ep < warmup ? std::vector<double>{rng.uniform(-1.0, 1.0)} : ag.act(obs, true, rng, sigma));
    }
    const double r = game.payoff[static_cast<std::size_t>(MatrixGame::readout(t.actions[0][0]))]
                                [static_cast<std::size_t>(MatrixGame::readout(t.actions[1][0]))];
    t.rewards = {r, r};
    t.done = true;
    buffer.push(std::move(t));
    if (buffer.size() >= warmup) maddpg_update(agents, buffer.sample(batch, rng), params);
    sigma *= config.maddpg_noise_decay;
  }
  MatrixGameResult out;
  for (auto& ag : agents) out.final_actions.push_back(ag.act(obs, false, rng, 0.0)[0]);
  out.joint_action = {MatrixGame::readout(out.final_actions[0]), MatrixGame::readout(out.final_actions[1])};
  const auto opt = game.optima();
  out.optimal = std::find(opt.begin(), opt.end(), out.joint_action) != opt.end();
  return out;
}

}  // namespace adaptnet
