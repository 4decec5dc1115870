#include "adaptnet/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "adaptnet/csv.hpp"
#include "adaptnet/kernels.hpp"

namespace adaptnet {

DetectionModel detection_model(const ScenarioConfig& config) {
  return {config.detection_law == "disk" ? DetectionLaw::Disk : DetectionLaw::Quadratic, config.snr_floor_db,
          config.snr_ref_db, config.false_alarm_prob};
}

double detection_probability(double range, double range_max, DetectionLaw law) {
  if (range > range_max) return 0.0;
  if (law == DetectionLaw::Disk) return 1.0;
  const double r = range / range_max;
  return std::clamp(1.0 - r * r, 0.0, 1.0);
}

std::vector<Detection> radar_scan(const Uav& uav, const World& world, Rng& rng, const DetectionModel& model) {
  std::vector<Detection> out;
  if (!uav.active || !uav.radar.active()) return out;
  const double snr = world.env.link_snr();
  const double factor = snr_quality(snr, model.snr_floor, model.snr_ref);
  const double sigma = world.env.sensor_noise_sigma;
  for (const auto& target : world.targets) {
    const double range = spatial_distance(uav.position, target.position);
    if (range > uav.radar.range_max) continue;
    const double u = rng.uniform();
    if (u < detection_probability(range, uav.radar.range_max, model.law) * factor) {
      const double mx = target.position.x + sigma * rng.normal();
      const double my = target.position.y + sigma * rng.normal();
      out.push_back({uav.id, target.id, {mx, my, world.time}, snr, world.time});
    }
  }
  if (model.false_alarm_prob > 0.0 && rng.uniform() < model.false_alarm_prob) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double radius = uav.radar.range_max * std::sqrt(rng.uniform());
    out.push_back({uav.id, -1,
                   {uav.position.x + radius * std::cos(angle), uav.position.y + radius * std::sin(angle), world.time},
                   snr, world.time});
  }
  return out;
}

std::vector<int> TrackStore::update(std::span<const Detection> detections, double now) {
  std::vector<int> joined;
  joined.reserve(detections.size());
  for (const auto& det : detections) {
    std::size_t best = tracks_.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      const Point& last = tracks_[i].points.back();
      if (last.t >= det.measured.t) continue;  // already extended at this timestamp
      const double d = spatial_distance(last, det.measured);
      // tracks_ is ordered by ascending id, so strict < keeps the lowest id on ties.
      if (d <= params_.gating_radius && d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best < tracks_.size()) {
      Track& tr = tracks_[best];
      tr.points.append(det.measured);
      if (tr.points.size() > params_.max_points) tr.points.drop_front(tr.points.size() - params_.max_points);
      tr.last_update = det.measured.t;
      joined.push_back(tr.track_id);
    } else {
      Track tr;
      tr.track_id = next_id_++;
      tr.points.append(det.measured);
      tr.last_update = det.measured.t;
      joined.push_back(tr.track_id);
      tracks_.push_back(std::move(tr));
    }
  }
  std::erase_if(tracks_, [&](const Track& t) { return now - t.last_update > params_.stale_time; });
  return joined;
}

std::vector<ScoredTrack> sensing_pipeline(std::span<Track> tracks, std::span<const Trajectory> references,
                                          double threshold, std::size_t comparison_length,
                                          std::size_t min_points, std::optional<double> updated_at) {
  std::vector<ScoredTrack> out;
  if (references.empty()) return out;
  std::vector<std::size_t> eligible;
  std::vector<Trajectory> prepared;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (updated_at && tracks[i].last_update != *updated_at) continue;
    if (tracks[i].points.size() >= min_points) {
      eligible.push_back(i);
      prepared.push_back(prepare_for_comparison(tracks[i].points, comparison_length));
    }
  }
  const auto scores = kernels::score_batch_parallel(prepared, references, threshold);
  for (std::size_t e = 0; e < eligible.size(); ++e) {
    Track& tr = tracks[eligible[e]];
    tr.relevance = scores[e];
    out.push_back({tr.track_id, scores[e]});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredTrack& a, const ScoredTrack& b) {
    if (a.score.distance != b.score.distance) return a.score.distance > b.score.distance;
    return a.track_id < b.track_id;
  });
  return out;
}

int plan_sensing_path(std::span<const ClusterSummary> report, std::span<const SensingPath> paths) {
  if (report.empty() || paths.empty()) return 0;
  const ClusterSummary* largest = &report[0];
  for (const auto& c : report) {
    if (c.size > largest->size || (c.size == largest->size && c.cluster < largest->cluster)) largest = &c;
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (const auto& wp : paths[p].waypoints) {
      const double d = std::hypot(wp.x - largest->centroid.x, wp.y - largest->centroid.y);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(p);
      }
    }
  }
  return best;
}

SensingNetwork::SensingNetwork(const ScenarioConfig& config, std::size_t uav_count)
    : config_(config), model_(detection_model(config)), uav_reports_(uav_count) {
  const TrackerParams params{config.gating_radius, config.track_stale_time,
                             static_cast<std::size_t>(config.track_max_points)};
  stores_.assign(uav_count, TrackStore(params));
}

namespace {

struct ClusterPass {
  std::vector<Trajectory> medoids;
  std::vector<ClusterSummary> report;
};

ClusterPass cluster_tracks(const std::vector<const Track*>& tracks, std::size_t k, std::size_t comparison_length,
                           std::uint64_t seed) {
  ClusterPass pass;
  if (tracks.empty()) return pass;
  std::vector<Trajectory> prepared;
  std::vector<Trajectory> raw;
  for (const Track* t : tracks) {
    prepared.push_back(prepare_for_comparison(t->points, comparison_length));
    raw.push_back(t->points);
  }
  const auto matrix = pairwise_frechet(prepared);
  const auto clustering = k_medoids(matrix, std::min(k, prepared.size()), seed);
  for (auto m : clustering.medoids) pass.medoids.push_back(prepared[m]);
  pass.report = cluster_report(clustering, raw);
  return pass;
}

}  // namespace

void SensingNetwork::refresh() {
  const auto min_points = static_cast<std::size_t>(config_.track_min_points);
  const auto k = static_cast<std::size_t>(config_.cluster_k);
  const auto length = static_cast<std::size_t>(config_.comparison_length);
  std::vector<const Track*> all;
  for (std::size_t u = 0; u < stores_.size(); ++u) {
    std::vector<const Track*> own;
    for (const auto& t : stores_[u].tracks()) {
      if (t.points.size() >= min_points) own.push_back(&t);
    }
    all.insert(all.end(), own.begin(), own.end());
    uav_reports_[u] = cluster_tracks(own, k, length, mix_seed(config_.seed, 2 * refreshes_ + 1 + 7919 * u)).report;
  }
  if (all.empty()) return;
  auto pass = cluster_tracks(all, k, length, mix_seed(config_.seed, 2 * refreshes_));
  references_ = std::move(pass.medoids);
  report_ = std::move(pass.report);
  ++refreshes_;
}

SensingNetwork::StepOutput SensingNetwork::sense(World& world, bool score) {
  StepOutput out;
  out.detections.resize(world.uavs.size());
  out.scored.resize(world.uavs.size());
  for (std::size_t u = 0; u < world.uavs.size(); ++u) {
    Uav& uav = world.uavs[u];
    out.detections[u] = radar_scan(uav, world, uav.rng, model_);
    stores_[u].update(out.detections[u], world.time);
  }
  const auto refresh_every = static_cast<std::size_t>(config_.cluster_refresh_steps);
  if (steps_ % refresh_every == 0 || references_.empty()) refresh();
  if (score && !references_.empty()) {
    for (std::size_t u = 0; u < world.uavs.size(); ++u) {
      out.scored[u] = sensing_pipeline(stores_[u].tracks(), references_, config_.frechet_threshold,
                                       static_cast<std::size_t>(config_.comparison_length),
                                       static_cast<std::size_t>(config_.track_min_points), world.time);
    }
  }
  ++steps_;
  return out;
}

void write_detection_header(std::ostream& out) { out << "time,uav_id,target_id,mx,my,snr\n"; }

void write_detection_rows(std::ostream& out, std::span<const Detection> detections) {
  for (const auto& d : detections) {
    out << csv::format(d.time) << ',' << d.uav_id << ',' << d.target_id << ',' << csv::format(d.measured.x) << ','
        << csv::format(d.measured.y) << ',' << csv::format(d.snr) << '\n';
  }
}

}  // namespace adaptnet
