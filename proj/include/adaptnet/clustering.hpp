#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "adaptnet/distance_matrix.hpp"
#include "adaptnet/trajectory.hpp"

namespace adaptnet {

/// k-medoids partition of n items. Clusters are numbered in ascending order
/// of their medoid's item index, so `medoids` is sorted.
struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  ///< cluster index per item, in [0, k)
  std::vector<std::size_t> medoids;     ///< item index of each cluster's medoid
  double cost = 0.0;                    ///< sum of item-to-medoid distances

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

struct ClusterSummary {
  std::size_t cluster = 0;
  std::size_t size = 0;
  Point centroid;  ///< mean (x, y) over every point of every member; t unused
  std::size_t medoid = 0;
};

/// Fréchet distance between every pair; entries are computed in parallel.
DistanceMatrix pairwise_frechet(std::span<const Trajectory> trajectories);

/// PAM: k distinct initial medoids drawn from Rng(seed), then best-improvement
/// swaps until no single medoid/non-medoid swap lowers the total cost.
/// Repeated from `restarts` successive draws of the same stream; the
/// cheapest local optimum is kept, earliest on ties. Ties resolve to the
/// lowest index everywhere.
Clustering k_medoids(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed, std::size_t restarts = 5);

/// Total distance of every item to its nearest medoid.
double clustering_cost(const DistanceMatrix& matrix, std::span<const std::size_t> medoids);

/// Nearest-medoid assignment; ties go to the lowest medoid position.
std::vector<std::size_t> assign_to_medoids(const DistanceMatrix& matrix, std::span<const std::size_t> medoids);

std::vector<ClusterSummary> cluster_report(const Clustering& clustering, std::span<const Trajectory> trajectories);

/// Mean silhouette coefficient; reporting only, never used to pick k.
/// Singleton clusters contribute 0.
double silhouette_score(const DistanceMatrix& matrix, const Clustering& clustering);

/// `traj_id,cluster,medoid,centroid_x,centroid_y`, one row per trajectory.
void write_clusters_csv(std::ostream& out, const Clustering& clustering, std::span<const Trajectory> trajectories);

}  // namespace adaptnet
