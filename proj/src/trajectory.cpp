#include "adaptnet/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "adaptnet/csv.hpp"
#include "adaptnet/error.hpp"

namespace adaptnet {

namespace {

void check_point(const Point& p, const Point* prev) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("trajectory point has non-finite coordinates");
  if (!std::isfinite(p.t) || p.t < 0.0) throw InvalidInput("trajectory timestamp must be finite and non-negative");
  if (prev != nullptr && !(p.t > prev->t)) throw InvalidInput("trajectory timestamps must be strictly increasing");
}

double parse_double(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidInput("trajectory csv line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return value;
}

}  // namespace

Trajectory::Trajectory(std::vector<Point> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  for (std::size_t i = 0; i < points_.size(); ++i) check_point(points_[i], i == 0 ? nullptr : &points_[i - 1]);
}

void Trajectory::append(const Point& p) {
  check_point(p, points_.empty() ? nullptr : &points_.back());
  points_.push_back(p);
}

void Trajectory::drop_front(std::size_t n) {
  n = std::min(n, points_.size());
  points_.erase(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(n));
}

double discrete_frechet(const Trajectory& a, const Trajectory& b) {
  if (a.empty() || b.empty()) throw InvalidInput("discrete_frechet: empty trajectory");
  const auto pa = a.points();
  const auto pb = b.points();
  const std::size_t n = pb.size();

  // prev holds the coupling values of row i-1, cur of row i.
  std::vector<double> prev(n), cur(n);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = spatial_distance(pa[i], pb[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = d;
      } else if (i == 0) {
        reach = std::max(cur[j - 1], d);
      } else if (j == 0) {
        reach = std::max(prev[0], d);
      } else {
        reach = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      }
      cur[j] = reach;
    }
    std::swap(prev, cur);
  }
  return prev[n - 1];
}

Trajectory resample_uniform(const Trajectory& a, std::size_t n) {
  if (n < 2) throw InvalidInput("resample_uniform: n must be at least 2");
  if (a.size() < 2) throw InvalidInput("resample_uniform: trajectory needs at least 2 points");
  const auto pts = a.points();

  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cumulative[i] = cumulative[i - 1] + spatial_distance(pts[i - 1], pts[i]);
  const double total = cumulative.back();

  std::vector<Point> out;
  out.reserve(n);
  if (!(total > 0.0)) {
    const Point& p0 = pts.front();
    const double t0 = pts.front().t;
    const double t1 = pts.back().t;
    for (std::size_t k = 0; k < n; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(n - 1);
      out.push_back({p0.x, p0.y, k + 1 == n ? t1 : t0 + f * (t1 - t0)});
    }
    return Trajectory(std::move(out), a.label());
  }

  out.push_back(pts.front());
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
    // Advance to the first segment whose end reaches s; zero-length segments are skipped.
    while (seg + 1 < pts.size() && cumulative[seg] < s) ++seg;
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const double f = seg_len > 0.0 ? std::clamp((s - cumulative[seg - 1]) / seg_len, 0.0, 1.0) : 1.0;
    const Point& p = pts[seg - 1];
    const Point& q = pts[seg];
    out.push_back({p.x + f * (q.x - p.x), p.y + f * (q.y - p.y), p.t + f * (q.t - p.t)});
  }
  out.push_back(pts.back());
  return Trajectory(std::move(out), a.label());
}

Trajectory prepare_for_comparison(const Trajectory& a, std::size_t n) {
  if (a.empty()) throw InvalidInput("prepare_for_comparison: empty trajectory");
  if (a.size() < 2) return a;
  return resample_uniform(a, n);
}

RelevanceScore relevance_score_prepared(const Trajectory& new_data, std::span<const Trajectory> references,
                                        double threshold) {
  if (references.empty()) throw InvalidInput("relevance_score: empty reference set");
  if (!(threshold > 0.0)) throw InvalidInput("relevance_score: threshold must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ref : references) best = std::min(best, discrete_frechet(new_data, ref));
  return {best, best > threshold};
}

RelevanceScore relevance_score(const Trajectory& new_data, std::span<const Trajectory> references,
                               double threshold, std::size_t comparison_length) {
  if (references.empty()) throw InvalidInput("relevance_score: empty reference set");
  std::vector<Trajectory> prepared;
  prepared.reserve(references.size());
  for (const auto& ref : references) prepared.push_back(prepare_for_comparison(ref, comparison_length));
  return relevance_score_prepared(prepare_for_comparison(new_data, comparison_length), prepared, threshold);
}

std::vector<double> windowed_frechet(const Trajectory& a, const Trajectory& b, std::size_t window,
                                     std::size_t stride) {
  if (window == 0 || stride == 0) throw InvalidInput("windowed_frechet: window and stride must be positive");
  std::vector<double> out;
  const std::size_t limit = std::min(a.size(), b.size());
  for (std::size_t start = 0; start + window <= limit; start += stride) {
    std::vector<Point> wa(a.points().begin() + start, a.points().begin() + start + window);
    std::vector<Point> wb(b.points().begin() + start, b.points().begin() + start + window);
    out.push_back(discrete_frechet(Trajectory(std::move(wa)), Trajectory(std::move(wb))));
  }
  return out;
}

std::vector<Trajectory> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("trajectory csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,x,y,t") throw InvalidInput("trajectory csv: header must be 'id,x,y,t'");

  std::vector<Trajectory> out;
  std::vector<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != 4) throw InvalidInput("trajectory csv line " + std::to_string(line_no) + ": expected 4 fields");
    const Point p{parse_double(fields[1], line_no), parse_double(fields[2], line_no), parse_double(fields[3], line_no)};
    if (out.empty() || out.back().label() != fields[0]) {
      if (std::find(seen.begin(), seen.end(), fields[0]) != seen.end()) {
        throw InvalidInput("trajectory csv line " + std::to_string(line_no) + ": rows for id '" + fields[0] +
                           "' are not grouped");
      }
      seen.push_back(fields[0]);
      out.emplace_back(std::vector<Point>{}, fields[0]);
    }
    try {
      out.back().append(p);
    } catch (const InvalidInput& e) {
      throw InvalidInput("trajectory csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, std::span<const Trajectory> trajectories) {
  out << "id,x,y,t\n";
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& tr = trajectories[i];
    const std::string id = tr.label().empty() ? std::to_string(i) : tr.label();
    for (const auto& p : tr.points()) {
      out << id << ',' << csv::format(p.x) << ',' << csv::format(p.y) << ',' << csv::format(p.t) << '\n';
    }
  }
}

}  // namespace adaptnet
