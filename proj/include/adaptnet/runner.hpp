#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adaptnet/config.hpp"

namespace adaptnet {

enum class Command { Simulate, TrainMode1, TrainMode2, AoiBench, Cluster, Frechet, ScaleSweep };

/// Throws UsageError for an unknown command name.
Command parse_command(std::string_view name);
const char* to_string(Command c);

struct RunOptions {
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> input;  ///< trajectory CSV for cluster / frechet
  const std::atomic<bool>* stop = nullptr;     ///< set asynchronously to interrupt
};

struct RunReport {
  std::vector<std::filesystem::path> artifacts;
  bool truncated = false;
};

/// Runs one command and writes its artifacts under options.out_dir. Every
/// artifact except `timing.csv` is a pure function of (config, command,
/// input). An interrupted run closes its files with a truncation marker:
/// `# truncated` for CSV, `{"truncated":true}` for JSON lines.
/// Throws IoError when the output directory is not writable.
RunReport run_scenario(const ScenarioConfig& config, Command command, const RunOptions& options);

/// One relevance evaluation produced by the sensing pipeline.
struct SensedUpdate {
  std::size_t step = 0;
  double time = 0.0;
  int uav = 0;
  int track_id = 0;
  double distance = 0.0;
};

/// Flies the scripted planner for `steps` steps and records every scored
/// update, so the same stream can be replayed through different uplinks.
std::vector<SensedUpdate> record_sensed_stream(const ScenarioConfig& config, std::size_t steps);

struct ReplayTotals {
  double bits_sent = 0.0;
  double high_bits_sub_threshold = 0.0;
  std::size_t full_packets = 0;
  std::size_t summary_packets = 0;
  std::size_t delivered = 0;
};

/// Feeds a recorded stream through one GatedUplink per UAV at `threshold`.
ReplayTotals replay_gated_stream(const ScenarioConfig& config, std::span<const SensedUpdate> stream,
                                 double threshold, std::size_t steps);

struct ScaleRow {
  std::int64_t uav_count = 0;
  std::size_t steps = 0;
  std::size_t detections = 0;
  double mean_error = 0.0;  ///< mean Euclidean measurement error, m
  double error_std = 0.0;
  double seconds_per_step = 0.0;  ///< wall clock; not part of the metrics files
};

/// Simulates config.scale_steps steps at one UAV count with the target count
/// held fixed.
ScaleRow scale_point(const ScenarioConfig& config, std::int64_t uav_count, const std::atomic<bool>* stop = nullptr);

}  // namespace adaptnet
