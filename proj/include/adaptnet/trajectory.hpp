#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace adaptnet {

/// Planar position in meters stamped with a time in seconds.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Euclidean distance over the (x, y) projection.
inline double spatial_distance(const Point& a, const Point& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Time-ordered point sequence. Timestamps are finite, non-negative and
/// strictly increasing; coordinates are finite. A default-constructed
/// trajectory is empty and is filled with append().
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Point> points, std::string label = {});

  void append(const Point& p);
  /// Removes the oldest `n` points (all of them if n >= size()).
  void drop_front(std::size_t n);

  std::span<const Point> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const Point& front() const { return points_.front(); }
  const Point& back() const { return points_.back(); }

  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<Point> points_;
  std::string label_;
};

struct RelevanceScore {
  double distance = 0.0;  ///< Fréchet distance to the closest reference, meters.
  bool is_novel = false;  ///< distance > threshold (equality is not novel).

  friend bool operator==(const RelevanceScore&, const RelevanceScore&) = default;
};

inline constexpr std::size_t kDefaultComparisonLength = 32;

/// Discrete Fréchet distance over the (x, y) projection, O(m n) time and
/// O(n) memory. Throws InvalidInput if either trajectory is empty.
double discrete_frechet(const Trajectory& a, const Trajectory& b);

/// `n` points equally spaced in cumulative arc length along the polyline,
/// endpoints preserved, timestamps interpolated linearly along each segment.
/// A polyline of zero length is resampled uniformly in time instead.
Trajectory resample_uniform(const Trajectory& a, std::size_t n);

/// Resamples to `n` points when the trajectory has at least two points; a
/// single-point trajectory is returned unchanged (its Fréchet distance to any
/// curve is unaffected by replication).
Trajectory prepare_for_comparison(const Trajectory& a, std::size_t n);

/// Minimum Fréchet distance between `new_data` and the references after both
/// are prepared to `comparison_length` points; novel iff distance > threshold.
RelevanceScore relevance_score(const Trajectory& new_data, std::span<const Trajectory> references,
                               double threshold,
                               std::size_t comparison_length = kDefaultComparisonLength);

/// Same as relevance_score but assumes every input is already prepared.
RelevanceScore relevance_score_prepared(const Trajectory& new_data,
                                        std::span<const Trajectory> references, double threshold);

/// Fréchet distance between index-aligned windows of two trajectories.
/// Window i covers points [i*stride, i*stride + window) of both inputs and
/// windows run while both trajectories have enough points.
std::vector<double> windowed_frechet(const Trajectory& a, const Trajectory& b, std::size_t window,
                                     std::size_t stride);

// CSV with header `id,x,y,t`. Rows must be grouped by id and strictly
// increasing in t within a group. Labels carry the id.
std::vector<Trajectory> read_trajectory_csv(std::istream& in);
void write_trajectory_csv(std::ostream& out, std::span<const Trajectory> trajectories);

}  // namespace adaptnet
