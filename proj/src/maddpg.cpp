#include "adaptnet/maddpg.hpp"

#include <algorithm>

#include "adaptnet/error.hpp"

namespace adaptnet {

namespace {


Eigen::MatrixXd stack(std::span<const JointTransition* const> batch, std::size_t agent, std::size_t dim,
                      const std::vector<std::vector<double>> JointTransition::*field) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& v = (batch[b]->*field)[agent];
    if (v.size() != dim) throw InvalidInput("maddpg: vector dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = v[i];
  }
  return m;
}

void check_shape(std::size_t agents, const JointTransition& t) {
  if (t.obs.size() != agents || t.actions.size() != agents || t.rewards.size() != agents ||
      t.next_obs.size() != agents) {
    throw InvalidInput("maddpg: transition agent count does not match the agent list");
  }
}

Eigen::MatrixXd column(std::span<const double> v) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

}  // namespace

MaddpgAgent::MaddpgAgent(std::size_t obs_dim, std::size_t action_dim, std::size_t critic_inputs,
                         const MaddpgParams& params, Rng& init)
    : actor(layer_plan(obs_dim, params.hidden, action_dim), OutputActivation::Tanh, init),
      critic(layer_plan(critic_inputs, params.hidden, 1), OutputActivation::Linear, init),
      target_actor(actor.layer_sizes(), OutputActivation::Tanh),
      target_critic(critic.layer_sizes(), OutputActivation::Linear) {
  if (critic_inputs < obs_dim + action_dim) throw InvalidInput("MaddpgAgent: critic input narrower than own obs+action");
  target_actor.copy_from(actor);
  target_critic.copy_from(critic);
}

std::vector<double> MaddpgAgent::act(std::span<const double> obs, bool explore, Rng& rng, double noise_sigma) const {
  if (obs.size() != obs_dim()) throw InvalidInput("MaddpgAgent::act: observation dimension mismatch");
  const Eigen::VectorXd a = actor.forward(obs);
  std::vector<double> out(a.data(), a.data() + a.size());
  if (explore) {
    for (auto& v : out) v = std::clamp(v + rng.normal(0.0, noise_sigma), -1.0, 1.0);
  }
  return out;
}

Eigen::MatrixXd critic_input(std::span<const Eigen::MatrixXd> obs, std::span<const Eigen::MatrixXd> actions) {
  Eigen::Index rows = 0;
  Eigen::Index cols = obs.empty() ? 0 : obs.front().cols();
  for (const auto& m : obs) rows += m.rows();
  for (const auto& m : actions) rows += m.rows();
  Eigen::MatrixXd x(rows, cols);
  Eigen::Index r = 0;
  for (const auto& m : obs) {
    x.middleRows(r, m.rows()) = m;
    r += m.rows();
  }
  for (const auto& m : actions) {
    x.middleRows(r, m.rows()) = m;
    r += m.rows();
  }
  return x;
}

double maddpg_td_target(std::span<const MaddpgAgent> agents, std::size_t i, const JointTransition& t, double gamma) {
  check_shape(agents.size(), t);
  if (i >= agents.size()) throw InvalidInput("maddpg_td_target: agent index out of range");
  if (t.done) return t.rewards[i];
  std::vector<Eigen::MatrixXd> obs;
  std::vector<Eigen::MatrixXd> act;
  for (std::size_t j = 0; j < agents.size(); ++j) {
    obs.push_back(column(t.next_obs[j]));
    act.push_back(agents[j].target_actor.forward_batch(obs.back()).output());
  }
  const double q = agents[i].target_critic.forward_batch(critic_input(obs, act)).output()(0, 0);
  return t.rewards[i] + gamma * q;
}

MaddpgStats maddpg_update(std::span<MaddpgAgent> agents, std::span<const JointTransition* const> batch,
                          const MaddpgParams& params) {
  if (batch.empty()) throw InvalidInput("maddpg_update: empty batch");
  const std::size_t n = agents.size();
  for (const auto* t : batch) check_shape(n, *t);
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(bsz);

  std::vector<Eigen::MatrixXd> obs(n), act(n), next_obs(n), next_act(n);
  for (std::size_t j = 0; j < n; ++j) {
    obs[j] = stack(batch, j, agents[j].obs_dim(), &JointTransition::obs);
    act[j] = stack(batch, j, agents[j].action_dim(), &JointTransition::actions);
    next_obs[j] = stack(batch, j, agents[j].obs_dim(), &JointTransition::next_obs);
    next_act[j] = agents[j].target_actor.forward_batch(next_obs[j]).output();
  }
  const Eigen::MatrixXd x = critic_input(obs, act);
  const Eigen::MatrixXd xn = critic_input(next_obs, next_act);
  Eigen::Index action_offset = 0;
  for (const auto& m : obs) action_offset += m.rows();

  MaddpgStats stats;
  for (std::size_t i = 0; i < n; ++i) {
    MaddpgAgent& ag = agents[i];
    if (static_cast<Eigen::Index>(ag.critic.input_dim()) != x.rows()) {
      throw InvalidInput("maddpg_update: critic input width does not match joint obs+action size");
    }
    const Eigen::MatrixXd qn = ag.target_critic.forward_batch(xn).output();
    Eigen::RowVectorXd y(bsz);
    for (Eigen::Index b = 0; b < bsz; ++b) {
      const auto* t = batch[static_cast<std::size_t>(b)];
      y(b) = t->rewards[i] + (t->done ? 0.0 : params.gamma * qn(0, b));
    }
    const auto cc = ag.critic.forward_batch(x);
    const Eigen::RowVectorXd err = cc.output().row(0) - y;
    stats.critic_loss.push_back(err.squaredNorm() * inv_b);
    ag.critic.sgd_step(ag.critic.backward(cc, 2.0 * inv_b * err), params.lr);

    const auto ca = ag.actor.forward_batch(obs[i]);
    Eigen::MatrixXd xa = x;
    Eigen::Index offset = action_offset;
    for (std::size_t j = 0; j < i; ++j) offset += act[j].rows();
    xa.middleRows(offset, act[i].rows()) = ca.output();
    const auto cq = ag.critic.forward_batch(xa);
    stats.actor_objective.push_back(cq.output().mean());
    const Eigen::MatrixXd d_q = Eigen::MatrixXd::Constant(1, bsz, -inv_b);
    const auto gq = ag.critic.backward(cq, d_q);
    const Eigen::MatrixXd d_action = gq.input.middleRows(offset, act[i].rows());
    ag.actor.sgd_step(ag.actor.backward(ca, d_action), params.lr);
  }
  for (auto& ag : agents) {
    ag.target_actor.soft_update(ag.actor, params.tau);
    ag.target_critic.soft_update(ag.critic, params.tau);
  }
  return stats;
}

}  // namespace adaptnet
