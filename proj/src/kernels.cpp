#include "adaptnet/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <utility>

#include "adaptnet/error.hpp"

namespace adaptnet {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (values_.size() != n * n) throw InvalidInput("DistanceMatrix: value count must be n*n");
  for (std::size_t i = 0; i < n; ++i) {
    if (values_[i * n + i] != 0.0) throw InvalidInput("DistanceMatrix: diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values_[i * n + j];
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("DistanceMatrix: entries must be finite and non-negative");
      if (v != values_[j * n + i]) throw InvalidInput("DistanceMatrix: matrix must be symmetric");
    }
  }
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  values_[i * n_ + j] = value;
  values_[j * n_ + i] = value;
}

namespace kernels {

namespace {

void require_nonempty(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw InvalidInput("pairwise Fréchet: empty trajectory list");
  for (const auto& t : trajectories) {
    if (t.empty()) throw InvalidInput("pairwise Fréchet: empty trajectory");
  }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

DistanceMatrix frechet_matrix_serial(std::span<const Trajectory> trajectories) {
  require_nonempty(trajectories);
  const std::size_t n = trajectories.size();
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, discrete_frechet(trajectories[i], trajectories[j]));
  }
  return m;
}

DistanceMatrix frechet_matrix_parallel(std::span<const Trajectory> trajectories) {
  require_nonempty(trajectories);
  const std::size_t n = trajectories.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> dist(pairs.size());
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    dist[p] = discrete_frechet(trajectories[pairs[p].first], trajectories[pairs[p].second]);
  }
  DistanceMatrix m(n);
  for (std::size_t p = 0; p < pairs.size(); ++p) m.set(pairs[p].first, pairs[p].second, dist[p]);
  return m;
}

std::vector<RelevanceScore> score_batch_serial(std::span<const Trajectory> candidates,
                                               std::span<const Trajectory> references, double threshold) {
  std::vector<RelevanceScore> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(relevance_score_prepared(c, references, threshold));
  return out;
}

std::vector<RelevanceScore> score_batch_parallel(std::span<const Trajectory> candidates,
                                                 std::span<const Trajectory> references, double threshold) {
  if (references.empty()) throw InvalidInput("relevance_score: empty reference set");
  if (!(threshold > 0.0)) throw InvalidInput("relevance_score: threshold must be positive");
  std::vector<RelevanceScore> out(candidates.size());
  const auto count = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 1) if (count > 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = relevance_score_prepared(candidates[i], references, threshold);
  return out;
}

}  // namespace kernels
}  // namespace adaptnet
