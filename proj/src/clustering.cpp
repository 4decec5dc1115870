#include "adaptnet/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "adaptnet/csv.hpp"
#include "adaptnet/error.hpp"
#include "adaptnet/kernels.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet {

DistanceMatrix pairwise_frechet(std::span<const Trajectory> trajectories) {
  return kernels::frechet_matrix_parallel(trajectories);
}

std::vector<std::size_t> assign_to_medoids(const DistanceMatrix& matrix, std::span<const std::size_t> medoids) {
  std::vector<std::size_t> assignment(matrix.size(), 0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      const double d = matrix(i, medoids[c]);
      if (d < best) {
        best = d;
        assignment[i] = c;
      }
    }
  }
  return assignment;
}

double clustering_cost(const DistanceMatrix& matrix, std::span<const std::size_t> medoids) {
  double total = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (auto m : medoids) best = std::min(best, matrix(i, m));
    total += best;
  }
  return total;
}

namespace {

// Best-improvement swaps from `medoids` until no single swap lowers the cost.
double pam_swap(const DistanceMatrix& matrix, std::vector<std::size_t>& medoids) {
  const std::size_t n = matrix.size();
  const std::size_t k = medoids.size();
  std::vector<bool> is_medoid(n, false);
  for (auto m : medoids) is_medoid[m] = true;
  double cost = clustering_cost(matrix, medoids);
  while (true) {
    double best_cost = cost;
    std::size_t best_slot = k;
    std::size_t best_item = n;
    std::vector<std::size_t> trial = medoids;
    for (std::size_t slot = 0; slot < k; ++slot) {
      for (std::size_t item = 0; item < n; ++item) {
        if (is_medoid[item]) continue;
        trial[slot] = item;
        const double c = clustering_cost(matrix, trial);
        // Relative margin stops cycling between swaps that differ only by rounding.
        if (c < best_cost - 1e-12 * std::max(1.0, cost)) {
          best_cost = c;
          best_slot = slot;
          best_item = item;
        }
      }
      trial[slot] = medoids[slot];
    }
    if (best_slot == k) break;
    is_medoid[medoids[best_slot]] = false;
    is_medoid[best_item] = true;
    medoids[best_slot] = best_item;
    std::sort(medoids.begin(), medoids.end());
    cost = best_cost;
  }
  return cost;
}

}  // namespace

Clustering k_medoids(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed, std::size_t restarts) {
  const std::size_t n = matrix.size();
  if (k < 1 || k > n) throw InvalidInput("k_medoids: k must satisfy 1 <= k <= n");
  if (restarts < 1) throw InvalidInput("k_medoids: restarts must be >= 1");

  Rng rng(seed);
  std::vector<std::size_t> medoids;
  double cost = 0.0;
  for (std::size_t r = 0; r < restarts; ++r) {
    // Partial Fisher-Yates draws k distinct items.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.uniform_index(n - i)]);
    std::vector<std::size_t> start(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(start.begin(), start.end());
    const double c = pam_swap(matrix, start);
    if (r == 0 || c < cost - 1e-12 * std::max(1.0, cost)) {
      cost = c;
      medoids = std::move(start);
    }
  }

  Clustering out;
  out.k = k;
  out.medoids = medoids;
  out.assignment = assign_to_medoids(matrix, medoids);
  // A medoid equidistant (0) to an earlier duplicate medoid still owns itself.
  for (std::size_t c = 0; c < k; ++c) out.assignment[medoids[c]] = c;
  out.cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.cost += matrix(i, medoids[out.assignment[i]]);
  return out;
}

std::vector<ClusterSummary> cluster_report(const Clustering& clustering, std::span<const Trajectory> trajectories) {
  if (clustering.assignment.size() != trajectories.size()) {
    throw InvalidInput("cluster_report: clustering does not match trajectory count");
  }
  std::vector<ClusterSummary> report(clustering.k);
  std::vector<double> sx(clustering.k, 0.0), sy(clustering.k, 0.0);
  std::vector<std::size_t> points(clustering.k, 0);
  for (std::size_t c = 0; c < clustering.k; ++c) {
    report[c].cluster = c;
    report[c].medoid = clustering.medoids[c];
  }
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const std::size_t c = clustering.assignment[i];
    ++report[c].size;
    for (const auto& p : trajectories[i].points()) {
      sx[c] += p.x;
      sy[c] += p.y;
      ++points[c];
    }
  }
  for (std::size_t c = 0; c < clustering.k; ++c) {
    if (points[c] > 0) {
      report[c].centroid = {sx[c] / static_cast<double>(points[c]), sy[c] / static_cast<double>(points[c]), 0.0};
    }
  }
  return report;
}

double silhouette_score(const DistanceMatrix& matrix, const Clustering& clustering) {
  const std::size_t n = matrix.size();
  if (n == 0 || clustering.k < 2) return 0.0;
  std::vector<std::size_t> sizes(clustering.k, 0);
  for (auto c : clustering.assignment) ++sizes[c];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = clustering.assignment[i];
    if (sizes[own] < 2) continue;
    std::vector<double> sums(clustering.k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[clustering.assignment[j]] += matrix(i, j);
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clustering.k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

void write_clusters_csv(std::ostream& out, const Clustering& clustering, std::span<const Trajectory> trajectories) {
  const auto report = cluster_report(clustering, trajectories);
  auto id_of = [&](std::size_t i) {
    return trajectories[i].label().empty() ? std::to_string(i) : trajectories[i].label();
  };
  out << "traj_id,cluster,medoid,centroid_x,centroid_y\n";
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& s = report[clustering.assignment[i]];
    out << id_of(i) << ',' << s.cluster << ',' << id_of(s.medoid) << ',' << csv::format(s.centroid.x) << ','
        << csv::format(s.centroid.y) << '\n';
  }
}

}  // namespace adaptnet
