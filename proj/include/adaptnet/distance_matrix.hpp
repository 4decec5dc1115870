#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adaptnet {

/// Symmetric n x n matrix of non-negative distances with a zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n = 0) : n_(n), values_(n * n, 0.0) {}
  /// Row-major values; throws InvalidInput unless symmetric, zero-diagonal, non-negative.
  DistanceMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value);
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> values_;
};

}  // namespace adaptnet
