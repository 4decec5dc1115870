#include "adaptnet/dqn.hpp"

#include <algorithm>

#include "adaptnet/error.hpp"

namespace adaptnet {

namespace {

Eigen::MatrixXd stack(std::span<const Transition* const> batch, bool next, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& v = next ? batch[b]->next_obs : batch[b]->obs;
    if (v.size() != dim) throw InvalidInput("dqn: observation dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = v[i];
  }
  return m;
}

}  // namespace

DqnAgent::DqnAgent(std::size_t obs_dim, std::size_t action_count, const DqnParams& params, Rng& init)
    : params_(params),
      online_(layer_plan(obs_dim, params.hidden, action_count), OutputActivation::Linear, init),
      target_(online_.layer_sizes(), OutputActivation::Linear) {
  target_.copy_from(online_);
}

DqnAgent::DqnAgent(std::size_t obs_dim, std::size_t action_count, const DqnParams& params)
    : params_(params),
      online_(layer_plan(obs_dim, params.hidden, action_count), OutputActivation::Linear),
      target_(online_.layer_sizes(), OutputActivation::Linear) {}

void DqnAgent::set_epsilon(double eps) { epsilon_ = std::clamp(eps, params_.epsilon_min, 1.0); }

std::vector<double> DqnAgent::q_values(std::span<const double> obs) const {
  const Eigen::VectorXd q = online_.forward(obs);
  return {q.data(), q.data() + q.size()};
}

int DqnAgent::greedy(std::span<const double> obs) const {
  const Eigen::VectorXd q = online_.forward(obs);
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < q.size(); ++a) {
    if (q(a) > q(best)) best = a;
  }
  return static_cast<int>(best);
}

int DqnAgent::act(std::span<const double> obs, bool explore, Rng& rng) const {
  if (obs.size() != obs_dim()) throw InvalidInput("DqnAgent::act: observation dimension mismatch");
  if (explore && rng.uniform() < epsilon_) return static_cast<int>(rng.uniform_index(action_count()));
  return greedy(obs);
}

double DqnAgent::td_target(const Transition& t) const {
  double y = t.reward;
  if (!t.done) y += params_.gamma * target_.forward(t.next_obs).maxCoeff();
  return y;
}

double DqnAgent::update(std::span<const Transition* const> batch) {
  if (batch.empty()) throw InvalidInput("DqnAgent::update: empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::MatrixXd x = stack(batch, false, obs_dim());
  const Eigen::MatrixXd xn = stack(batch, true, obs_dim());
  const Eigen::MatrixXd qn = target_.forward_batch(xn).output();
  Eigen::VectorXd y(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = *batch[static_cast<std::size_t>(b)];
    if (t.action < 0 || static_cast<std::size_t>(t.action) >= action_count()) {
      throw InvalidInput("DqnAgent::update: action out of range");
    }
    y(b) = t.reward + (t.done ? 0.0 : params_.gamma * qn.col(b).maxCoeff());
  }
  const auto cache = online_.forward_batch(x);
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(cache.output().rows(), n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto a = static_cast<Eigen::Index>(batch[static_cast<std::size_t>(b)]->action);
    d_out(a, b) = 2.0 * (cache.output()(a, b) - y(b)) / static_cast<double>(n);
  }
  online_.sgd_step(online_.backward(cache, d_out), params_.lr);
  ++updates_;
  if (params_.sync_every > 0 && updates_ % params_.sync_every == 0) target_.copy_from(online_);

  const Eigen::MatrixXd q = online_.forward_batch(x).output();
  double loss = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const double e = q(batch[static_cast<std::size_t>(b)]->action, b) - y(b);
    loss += e * e;
  }
  return loss / static_cast<double>(n);
}

double epsilon_schedule(std::size_t episode, std::size_t episodes, double start, double end, double fraction) {
  const double horizon = fraction * static_cast<double>(episodes);
  if (horizon <= 0.0) return end;
  const double f = std::min(1.0, static_cast<double>(episode) / horizon);
  return start + (end - start) * f;
}

}  // namespace adaptnet
