#include "adaptnet/mlp.hpp"

#include <atomic>
#include <cmath>

#include "adaptnet/error.hpp"

namespace adaptnet {

namespace {

std::atomic<std::uint64_t> g_version{0};

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw InvalidInput("Mlp: need at least input and output sizes");
  for (auto s : sizes) {
    if (s == 0) throw InvalidInput("Mlp: layer sizes must be positive");
  }
}

}  // namespace

std::vector<std::size_t> layer_plan(std::size_t input, std::span<const std::int64_t> hidden, std::size_t output) {
  std::vector<std::size_t> sizes{input};
  for (auto h : hidden) sizes.push_back(static_cast<std::size_t>(h));
  sizes.push_back(output);
  return sizes;
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, OutputActivation output)
    : sizes_(std::move(layer_sizes)), output_(output) {
  check_sizes(sizes_);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sizes_[l + 1]), static_cast<Eigen::Index>(sizes_[l])));
    biases_.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sizes_[l + 1])));
  }
  touch();
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, OutputActivation output, Rng& rng) : Mlp(std::move(layer_sizes), output) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = rng.uniform(-bound, bound);
  }
  touch();
}

void Mlp::touch() noexcept { version_ = ++g_version; }

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  if (static_cast<std::size_t>(input.size()) != input_dim()) throw InvalidInput("Mlp::forward: input dimension mismatch");
  Eigen::VectorXd a = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) {
      a = z.cwiseMax(0.0);
    } else if (output_ == OutputActivation::Tanh) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Eigen::VectorXd Mlp::forward(std::span<const double> input) const {
  return forward(Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size())).eval());
}

Mlp::Cache Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_dim()) {
    throw InvalidInput("Mlp::forward_batch: input dimension mismatch");
  }
  Cache cache;
  cache.owner = this;
  cache.version = version_;
  cache.activations.reserve(weights_.size() + 1);
  cache.pre.reserve(weights_.size());
  cache.activations.push_back(inputs);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * cache.activations.back();
    z.colwise() += biases_[l];
    Eigen::MatrixXd a;
    if (l + 1 < weights_.size()) {
      a = z.cwiseMax(0.0);
    } else if (output_ == OutputActivation::Tanh) {
      a = z.array().tanh().matrix();
    } else {
      a = z;
    }
    cache.pre.push_back(std::move(z));
    cache.activations.push_back(std::move(a));
  }
  return cache;
}

Mlp::Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_output) const {
  if (cache.owner != this || cache.version != version_ || cache.activations.size() != weights_.size() + 1) {
    throw UsageError("Mlp::backward: forward cache is missing or stale");
  }
  if (d_output.rows() != cache.output().rows() || d_output.cols() != cache.output().cols()) {
    throw InvalidInput("Mlp::backward: output gradient shape mismatch");
  }
  Gradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());
  Eigen::MatrixXd delta = d_output;
  if (output_ == OutputActivation::Tanh) {
    delta.array() *= (1.0 - cache.output().array().square());
  }
  for (std::size_t l = weights_.size(); l-- > 0;) {
    g.weights[l] = delta * cache.activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    Eigen::MatrixXd prev = weights_[l].transpose() * delta;
    if (l > 0) prev.array() *= (cache.pre[l - 1].array() > 0.0).cast<double>();
    delta = std::move(prev);
  }
  g.input = std::move(delta);
  return g;
}

void Mlp::sgd_step(const Gradients& grads, double lr) {
  if (grads.weights.size() != weights_.size()) throw InvalidInput("Mlp::sgd_step: gradient layer count mismatch");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] -= lr * grads.weights[l];
    biases_[l] -= lr * grads.biases[l];
  }
  touch();
}

void Mlp::copy_from(const Mlp& other) {
  if (other.sizes_ != sizes_) throw InvalidInput("Mlp::copy_from: shape mismatch");
  weights_ = other.weights_;
  biases_ = other.biases_;
  touch();
}

void Mlp::soft_update(const Mlp& other, double tau) {
  if (other.sizes_ != sizes_) throw InvalidInput("Mlp::soft_update: shape mismatch");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = tau * other.weights_[l] + (1.0 - tau) * weights_[l];
    biases_[l] = tau * other.biases_[l] + (1.0 - tau) * biases_[l];
  }
  touch();
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  return n;
}

// Returns (row, col) within the layer; col == npos marks a bias entry.
std::pair<std::size_t, std::size_t> Mlp::locate(std::size_t index, std::size_t& layer) const {
  for (layer = 0; layer < weights_.size(); ++layer) {
    const auto rows = static_cast<std::size_t>(weights_[layer].rows());
    const auto cols = static_cast<std::size_t>(weights_[layer].cols());
    if (index < rows * cols) return {index / cols, index % cols};
    index -= rows * cols;
    if (index < rows) return {index, static_cast<std::size_t>(-1)};
    index -= rows;
  }
  throw InvalidInput("Mlp: parameter index out of range");
}

double Mlp::parameter(std::size_t index) const {
  std::size_t layer = 0;
  const auto [r, c] = locate(index, layer);
  if (c == static_cast<std::size_t>(-1)) return biases_[layer](static_cast<Eigen::Index>(r));
  return weights_[layer](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

void Mlp::set_parameter(std::size_t index, double value) {
  std::size_t layer = 0;
  const auto [r, c] = locate(index, layer);
  if (c == static_cast<std::size_t>(-1)) {
    biases_[layer](static_cast<Eigen::Index>(r)) = value;
  } else {
    weights_[layer](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
  }
  touch();
}

std::vector<double> Mlp::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) out.push_back(weights_[l](r, c));
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) out.push_back(biases_[l](r));
  }
  return out;
}

void Mlp::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw InvalidInput("Mlp::set_flat_parameters: wrong parameter count");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = values[k++];
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = values[k++];
  }
  touch();
}

std::vector<double> Mlp::flatten(const Gradients& grads) {
  std::vector<double> out;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    for (Eigen::Index r = 0; r < grads.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < grads.weights[l].cols(); ++c) out.push_back(grads.weights[l](r, c));
    }
    for (Eigen::Index r = 0; r < grads.biases[l].size(); ++r) out.push_back(grads.biases[l](r));
  }
  return out;
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

}  // namespace adaptnet
