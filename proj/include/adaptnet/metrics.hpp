#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adaptnet {

using Cell = std::variant<std::int64_t, double, std::string>;

std::string format_cell(const Cell& cell);

/// Append-only table with a column set fixed at construction.
class MetricsFrame {
 public:
  explicit MetricsFrame(std::vector<std::string> columns);

  /// Throws InvalidInput when the row width differs from the column count.
  void append(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool has_column(std::string_view name) const;
  /// Throws SchemaError naming the column when absent.
  std::size_t column_index(std::string_view name) const;
  /// Cell as a number (ints widen, strings parse).
  double number(std::size_t row, std::string_view column) const;
  std::string text(std::size_t row, std::string_view column) const;

  void write_csv(std::ostream& out) const;
  /// Cells are read as text; number() parses them on demand.
  static MetricsFrame read_csv(std::istream& in);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

enum class PlotKind { AoiCurves, TrainingCurves, ClusterMap, TrajectoryCompare };

PlotKind parse_plot_kind(std::string_view name);
const char* to_string(PlotKind kind);

struct PlotOptions {
  std::size_t window = 20;  ///< trajectory_compare window, points
  std::size_t stride = 5;
};

/// Columns the input frame must carry for `kind`.
std::vector<std::string> required_columns(PlotKind kind);

/// Writes `<kind>.csv` under `dir` and returns its path. Throws SchemaError
/// listing every missing input column.
///  - aoi_curves:         lambda,discipline,avg_aoi
///  - training_curves:    episode,agent,cum_reward (sorted by episode, then agent)
///  - cluster_map:        traj_id,cluster,centroid_x,centroid_y
///  - trajectory_compare: window,start_time,distance between the first two
///                        uav ids of a `time,uav_id,x,y` frame
std::filesystem::path emit_plot_data(const MetricsFrame& frame, PlotKind kind, const std::filesystem::path& dir,
                                     const PlotOptions& options = {});

}  // namespace adaptnet
