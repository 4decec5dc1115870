#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "adaptnet/clustering.hpp"
#include "adaptnet/config.hpp"
#include "adaptnet/trajectory.hpp"
#include "adaptnet/world.hpp"

namespace adaptnet {

struct Detection {
  int uav_id = 0;
  int target_id = -1;  ///< ground truth for scoring; never exposed to policies. -1 = false alarm
  Point measured;      ///< truth + N(0, sigma^2) per axis; t = scan time
  double snr = 0.0;    ///< dB
  double time = 0.0;
};

enum class DetectionLaw { Quadratic, Disk };

struct DetectionModel {
  DetectionLaw law = DetectionLaw::Quadratic;
  double snr_floor = 0.0;
  double snr_ref = 20.0;
  double false_alarm_prob = 0.0;  ///< per scan; 0 disables
};

DetectionModel detection_model(const ScenarioConfig& config);

/// Probability of detecting a target at `range` before SNR scaling.
/// Quadratic: clamp(1 - (range/range_max)^2, 0, 1); disk: 1 inside range.
double detection_probability(double range, double range_max, DetectionLaw law);

/// One radar scan at the world's current time. Silent-window scans and
/// inactive UAVs return nothing. Targets are visited in id order and every
/// in-range target consumes one uniform draw (plus two normals if detected).
std::vector<Detection> radar_scan(const Uav& uav, const World& world, Rng& rng, const DetectionModel& model);

struct TrackerParams {
  double gating_radius = 25.0;
  double stale_time = 5.0;
  std::size_t max_points = 64;
};

struct Track {
  int track_id = 0;
  Trajectory points;
  double last_update = 0.0;
  RelevanceScore relevance;
};

/// Nearest-neighbour track association for one UAV.
class TrackStore {
 public:
  explicit TrackStore(TrackerParams params = {}) : params_(params) {}

  /// Associates detections in order; returns the track id each one joined or
  /// spawned. A track accepts at most one detection per timestamp. Tracks
  /// idle for longer than stale_time at `now` are retired afterwards.
  std::vector<int> update(std::span<const Detection> detections, double now);

  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  std::vector<Track>& tracks() noexcept { return tracks_; }
  int next_id() const noexcept { return next_id_; }

 private:
  TrackerParams params_;
  std::vector<Track> tracks_;
  int next_id_ = 0;
};

struct ScoredTrack {
  int track_id = 0;
  RelevanceScore score;
};

/// Scores every track with at least `min_points` points against prepared
/// references and stores the score on the track. With `updated_at` set, only
/// tracks whose last update happened at that time are scored. Output is
/// ordered most novel first (distance descending, ties by track id). Empty
/// references yield an empty result.
std::vector<ScoredTrack> sensing_pipeline(std::span<Track> tracks, std::span<const Trajectory> references,
                                          double threshold, std::size_t comparison_length,
                                          std::size_t min_points,
                                          std::optional<double> updated_at = std::nullopt);

/// Path whose nearest waypoint is closest to the largest cluster's centroid.
/// Ties: lowest cluster id, then lowest path index. Empty report -> 0.
int plan_sensing_path(std::span<const ClusterSummary> report, std::span<const SensingPath> paths);

/// Track stores for every UAV plus the shared reference patterns. References
/// are the medoids of a clustering pass over all UAVs' tracks, refreshed
/// every `cluster_refresh_steps` steps (or whenever none exist yet).
class SensingNetwork {
 public:
  SensingNetwork(const ScenarioConfig& config, std::size_t uav_count);

  struct StepOutput {
    std::vector<std::vector<Detection>> detections;  ///< per UAV
    std::vector<std::vector<ScoredTrack>> scored;    ///< per UAV, most novel first
  };

  /// Scans with each UAV's substream, updates tracks, refreshes references
  /// when due and scores the tracks that received a detection this step
  /// (skipped when `score` is false).
  StepOutput sense(World& world, bool score = true);

  const std::vector<Trajectory>& references() const noexcept { return references_; }
  /// Team-wide cluster report from the last refresh.
  const std::vector<ClusterSummary>& report() const noexcept { return report_; }
  /// Cluster report over one UAV's own tracks from the last refresh.
  const std::vector<ClusterSummary>& uav_report(std::size_t uav) const { return uav_reports_.at(uav); }
  const TrackStore& store(std::size_t uav) const { return stores_.at(uav); }
  std::size_t refreshes() const noexcept { return refreshes_; }

 private:
  void refresh();

  ScenarioConfig config_;
  DetectionModel model_;
  std::vector<TrackStore> stores_;
  std::vector<Trajectory> references_;
  std::vector<ClusterSummary> report_;
  std::vector<std::vector<ClusterSummary>> uav_reports_;
  std::size_t steps_ = 0;
  std::size_t refreshes_ = 0;
};

/// `time,uav_id,target_id,mx,my,snr`
void write_detection_header(std::ostream& out);
void write_detection_rows(std::ostream& out, std::span<const Detection> detections);

}  // namespace adaptnet
