#include "adaptnet/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>

#include "adaptnet/csv.hpp"
#include "adaptnet/error.hpp"
#include "adaptnet/trajectory.hpp"

namespace adaptnet {

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return csv::format(v);
        }
      },
      cell);
}

MetricsFrame::MetricsFrame(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw InvalidInput("MetricsFrame: no columns");
}

void MetricsFrame::append(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw InvalidInput("MetricsFrame::append: row width does not match columns");
  rows_.push_back(std::move(row));
}

bool MetricsFrame::has_column(std::string_view name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::size_t MetricsFrame::column_index(std::string_view name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw SchemaError({std::string(name)});
  return static_cast<std::size_t>(it - columns_.begin());
}

double MetricsFrame::number(std::size_t row, std::string_view column) const {
  const Cell& c = rows_.at(row).at(column_index(column));
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  const auto& s = std::get<std::string>(c);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("MetricsFrame: column " + std::string(column) + " holds non-numeric '" + s + "'");
  }
  return v;
}

std::string MetricsFrame::text(std::size_t row, std::string_view column) const {
  return format_cell(rows_.at(row).at(column_index(column)));
}

void MetricsFrame::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

MetricsFrame MetricsFrame::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("metrics csv: missing header");
  MetricsFrame frame(csv::split(line));
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    auto fields = csv::split(line);
    std::vector<Cell> row(fields.begin(), fields.end());
    frame.append(std::move(row));
  }
  return frame;
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "aoi_curves") return PlotKind::AoiCurves;
  if (name == "training_curves") return PlotKind::TrainingCurves;
  if (name == "cluster_map") return PlotKind::ClusterMap;
  if (name == "trajectory_compare") return PlotKind::TrajectoryCompare;
  throw InvalidInput("unknown plot kind: " + std::string(name));
}

const char* to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::AoiCurves: return "aoi_curves";
    case PlotKind::TrainingCurves: return "training_curves";
    case PlotKind::ClusterMap: return "cluster_map";
    case PlotKind::TrajectoryCompare: return "trajectory_compare";
  }
  return "?";
}

std::vector<std::string> required_columns(PlotKind kind) {
  switch (kind) {
    case PlotKind::AoiCurves: return {"lambda", "discipline", "avg_aoi"};
    case PlotKind::TrainingCurves: return {"episode", "agent_id", "cum_reward"};
    case PlotKind::ClusterMap: return {"traj_id", "cluster", "centroid_x", "centroid_y"};
    case PlotKind::TrajectoryCompare: return {"time", "uav_id", "x", "y"};
  }
  return {};
}

namespace {

MetricsFrame project(const MetricsFrame& frame, const std::vector<std::string>& from,
                     const std::vector<std::string>& to) {
  std::vector<std::size_t> idx;
  for (const auto& c : from) idx.push_back(frame.column_index(c));
  MetricsFrame out(to);
  for (const auto& row : frame.rows()) {
    std::vector<Cell> r;
    for (auto i : idx) r.push_back(row[i]);
    out.append(std::move(r));
  }
  return out;
}

MetricsFrame trajectory_compare(const MetricsFrame& frame, const PlotOptions& options) {
  std::map<std::int64_t, std::vector<Point>> paths;
  for (std::size_t r = 0; r < frame.size(); ++r) {
    const auto id = static_cast<std::int64_t>(frame.number(r, "uav_id"));
    paths[id].push_back({frame.number(r, "x"), frame.number(r, "y"), frame.number(r, "time")});
  }
  if (paths.size() < 2) throw InvalidInput("trajectory_compare: need samples from two UAVs");
  auto it = paths.begin();
  const Trajectory a(it->second);
  const Trajectory b((++it)->second);
  const auto distances = windowed_frechet(a, b, options.window, options.stride);
  MetricsFrame out({"window", "start_time", "distance"});
  for (std::size_t w = 0; w < distances.size(); ++w) {
    out.append({static_cast<std::int64_t>(w), a[w * options.stride].t, distances[w]});
  }
  return out;
}

}  // namespace

std::filesystem::path emit_plot_data(const MetricsFrame& frame, PlotKind kind, const std::filesystem::path& dir,
                                     const PlotOptions& options) {
  std::vector<std::string> missing;
  for (const auto& c : required_columns(kind)) {
    if (!frame.has_column(c)) missing.push_back(c);
  }
  if (!missing.empty()) throw SchemaError(missing);

  MetricsFrame out({"_"});
  switch (kind) {
    case PlotKind::AoiCurves:
      out = project(frame, {"lambda", "discipline", "avg_aoi"}, {"lambda", "discipline", "avg_aoi"});
      break;
    case PlotKind::TrainingCurves: {
      std::vector<std::size_t> order(frame.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double ex = frame.number(x, "episode");
        const double ey = frame.number(y, "episode");
        if (ex != ey) return ex < ey;
        return frame.number(x, "agent_id") < frame.number(y, "agent_id");
      });
      const auto ie = frame.column_index("episode");
      const auto ia = frame.column_index("agent_id");
      const auto ir = frame.column_index("cum_reward");
      out = MetricsFrame({"episode", "agent", "cum_reward"});
      for (auto r : order) {
        const auto& row = frame.rows()[r];
        out.append({row[ie], row[ia], row[ir]});
      }
      break;
    }
    case PlotKind::ClusterMap:
      out = project(frame, {"traj_id", "cluster", "centroid_x", "centroid_y"},
                    {"traj_id", "cluster", "centroid_x", "centroid_y"});
      break;
    case PlotKind::TrajectoryCompare:
      out = trajectory_compare(frame, options);
      break;
  }
  std::filesystem::create_directories(dir);
  const auto path = dir / (std::string(to_string(kind)) + ".csv");
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  out.write_csv(file);
  if (!file) throw IoError("failed writing " + path.string());
  return path;
}

}  // namespace adaptnet
