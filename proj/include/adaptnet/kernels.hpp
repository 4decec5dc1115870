#pragma once

// Data-parallel hot loops. Every kernel has a serial reference with the same
// contract; the OpenMP variants compute each output entry independently, so
// their results are bit-identical to the serial ones for any thread count.

#include <span>
#include <vector>

#include "adaptnet/distance_matrix.hpp"
#include "adaptnet/trajectory.hpp"

namespace adaptnet::kernels {

DistanceMatrix frechet_matrix_serial(std::span<const Trajectory> trajectories);
DistanceMatrix frechet_matrix_parallel(std::span<const Trajectory> trajectories);

/// relevance_score_prepared for every candidate against the same references.
std::vector<RelevanceScore> score_batch_serial(std::span<const Trajectory> candidates,
                                               std::span<const Trajectory> references, double threshold);
std::vector<RelevanceScore> score_batch_parallel(std::span<const Trajectory> candidates,
                                                 std::span<const Trajectory> references, double threshold);

int max_threads();

}  // namespace adaptnet::kernels
