#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "adaptnet/rng.hpp"

namespace adaptnet {

enum class OutputActivation { Linear, Tanh };

/// Fully connected network: ReLU on every hidden layer, linear or tanh head.
/// Samples are columns in the batched API. Gradients are computed by hand.
class Mlp {
 public:
  /// Zero weights and biases.
  Mlp(std::vector<std::size_t> layer_sizes, OutputActivation output);
  /// Weights and biases uniform in +-1/sqrt(fan_in), drawn layer by layer.
  Mlp(std::vector<std::size_t> layer_sizes, OutputActivation output, Rng& rng);

  /// Activations kept for backward(). Tied to the parameter version of the
  /// network that produced it.
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  ///< [0] = input, back() = output
    std::vector<Eigen::MatrixXd> pre;          ///< pre-activation per layer
    const Mlp* owner = nullptr;
    std::uint64_t version = 0;

    const Eigen::MatrixXd& output() const { return activations.back(); }
  };

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    Eigen::MatrixXd input;  ///< d loss / d input, one column per sample
  };

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::VectorXd forward(std::span<const double> input) const;
  Cache forward_batch(const Eigen::MatrixXd& inputs) const;

  /// Reverse-mode gradients of sum_k <d_output_k, f(x_k)> over the batch.
  /// Throws UsageError if the cache is missing or the parameters changed
  /// since it was produced.
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& d_output) const;

  /// theta <- theta - lr * grad
  void sgd_step(const Gradients& grads, double lr);
  void copy_from(const Mlp& other);
  /// theta <- tau * other + (1 - tau) * theta
  void soft_update(const Mlp& other, double tau);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t input_dim() const noexcept { return sizes_.front(); }
  std::size_t output_dim() const noexcept { return sizes_.back(); }
  OutputActivation output_activation() const noexcept { return output_; }
  std::size_t layer_count() const noexcept { return weights_.size(); }
  const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_.at(layer); }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_.at(layer); }

  // Flat parameter view: per layer, weights row-major then biases.
  std::size_t parameter_count() const noexcept;
  double parameter(std::size_t index) const;
  void set_parameter(std::size_t index, double value);
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);
  /// Flattens gradients in the same order as flat_parameters().
  static std::vector<double> flatten(const Gradients& grads);

  std::uint64_t version() const noexcept { return version_; }
  bool all_finite() const;

 private:
  void touch() noexcept;
  std::pair<std::size_t, std::size_t> locate(std::size_t index, std::size_t& layer) const;

  std::vector<std::size_t> sizes_;
  OutputActivation output_;
  std::vector<Eigen::MatrixXd> weights_;  ///< out x in
  std::vector<Eigen::VectorXd> biases_;
  std::uint64_t version_ = 0;
};

/// Mlp layer list [input, hidden..., output].
std::vector<std::size_t> layer_plan(std::size_t input, std::span<const std::int64_t> hidden, std::size_t output);

}  // namespace adaptnet
