#include "adaptnet/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include <json.hpp>

#include "adaptnet/clustering.hpp"
#include "adaptnet/comms.hpp"
#include "adaptnet/csv.hpp"
#include "adaptnet/error.hpp"
#include "adaptnet/kernels.hpp"
#include "adaptnet/metrics.hpp"
#include "adaptnet/modes.hpp"
#include "adaptnet/sensing.hpp"
#include "adaptnet/training.hpp"
#include "adaptnet/world.hpp"

namespace adaptnet {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

Command parse_command(std::string_view name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "train-mode1") return Command::TrainMode1;
  if (name == "train-mode2") return Command::TrainMode2;
  if (name == "aoi-bench") return Command::AoiBench;
  if (name == "cluster") return Command::Cluster;
  if (name == "frechet") return Command::Frechet;
  if (name == "scale-sweep") return Command::ScaleSweep;
  throw UsageError("unknown command: " + std::string(name));
}

const char* to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::TrainMode1: return "train-mode1";
    case Command::TrainMode2: return "train-mode2";
    case Command::AoiBench: return "aoi-bench";
    case Command::Cluster: return "cluster";
    case Command::Frechet: return "frechet";
    case Command::ScaleSweep: return "scale-sweep";
  }
  return "?";
}

namespace {

bool stopped(const std::atomic<bool>* stop) { return stop && stop->load(); }

/// Output file that remembers its path for the run report.
class Artifact {
 public:
  Artifact(const fs::path& dir, const std::string& name, RunReport& report) : path_(dir / name) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write " + path_.string());
    report.artifacts.push_back(path_);
  }
  ~Artifact() { out_.close(); }

  std::ofstream& stream() { return out_; }
  template <typename T>
  Artifact& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  void close() {
    out_.flush();
    if (!out_) throw IoError("failed writing " + path_.string());
    out_.close();
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const auto probe = dir / ".adaptnet_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

void write_json(const fs::path& dir, const std::string& name, const ordered_json& doc, RunReport& report) {
  Artifact a(dir, name, report);
  a << doc.dump(2) << '\n';
  a.close();
}

ordered_json config_echo(const ScenarioConfig& config) {
  return ordered_json::parse(to_json(config).dump());
}

std::vector<Trajectory> load_input(const RunOptions& options) {
  if (!options.input) throw UsageError("this command needs --input <trajectory csv>");
  std::ifstream in(*options.input);
  if (!in) throw IoError("cannot read " + options.input->string());
  return read_trajectory_csv(in);
}

// ---------------------------------------------------------------------------
// Scripted mission: planner-driven flight, sensing, gated uplinks.

struct MissionStep {
  const World& world;
  const SensingNetwork::StepOutput& sensed;
  const std::vector<ServeResult>& served;
  const std::vector<std::size_t>& dropped;  ///< per UAV, this step
  const AoiTracker& aoi;
};

struct MissionTotals {
  std::size_t steps = 0;
  std::size_t detections = 0;
  double error_sum = 0.0;
  double error_sq_sum = 0.0;
  bool truncated = false;
};

std::vector<UavCommand> planner_commands(const World& world, const SensingNetwork& sensing) {
  std::vector<UavCommand> commands;
  for (std::size_t u = 0; u < world.uavs.size(); ++u) {
    const auto& report = sensing.uav_report(u);
    commands.push_back(UavCommand::follow(report.empty() ? world.uavs[u].assigned_path
                                                         : plan_sensing_path(report, world.paths)));
  }
  return commands;
}

MissionTotals run_mission(const ScenarioConfig& config, std::size_t steps, const std::atomic<bool>* stop,
                          const std::function<void(const World&)>& on_start,
                          const std::function<void(const MissionStep&)>& on_step) {
  World world = init_world(config);
  const std::size_t n = world.uavs.size();
  SensingNetwork sensing(config, n);
  std::vector<GatedUplink> uplinks;
  std::vector<Rng> link_rng;
  for (std::size_t u = 0; u < n; ++u) {
    uplinks.emplace_back(config, static_cast<int>(u));
    link_rng.push_back(world.rng.substream(3000 + u));
  }
  AoiTracker aoi(n, world.time);
  if (on_start) on_start(world);
  MissionTotals totals;
  std::vector<ServeResult> served(n);
  std::vector<std::size_t> dropped(n);
  for (std::size_t s = 0; s < steps; ++s) {
    if (stopped(stop)) {
      totals.truncated = true;
      break;
    }
    advance_world(world, planner_commands(world, sensing));
    const auto sensed = sensing.sense(world, true);
    for (std::size_t u = 0; u < n; ++u) {
      for (const auto& d : sensed.detections[u]) {
        if (d.target_id < 0) continue;
        const auto& truth = world.targets[static_cast<std::size_t>(d.target_id)].position;
        const double e = std::hypot(d.measured.x - truth.x, d.measured.y - truth.y);
        totals.error_sum += e;
        totals.error_sq_sum += e * e;
        ++totals.detections;
      }
      for (const auto& st : sensed.scored[u]) uplinks[u].submit(st.track_id, st.score, world.time);
    }
    std::vector<Packet> informative;
    for (std::size_t u = 0; u < n; ++u) {
      const auto before = uplinks[u].queue().dropped();
      served[u] = uplinks[u].step(world.env.link_snr(), world.dt, world.time, link_rng[u]);
      dropped[u] = uplinks[u].queue().dropped() - before;
      draw_energy(world.uavs[u], served[u].energy_j);
      for (const auto& p : served[u].delivered) {
        if (p.relevance.distance > 0.0) informative.push_back(p);
      }
    }
    aoi.update(informative, world.time, world.dt);
    ++totals.steps;
    if (on_step) on_step({world, sensed, served, dropped, aoi});
  }
  return totals;
}

RunReport run_simulate(const ScenarioConfig& config, const RunOptions& options) {
  RunReport report;
  const auto discipline = std::string(to_string(parse_discipline(config.queue_discipline)));
  Artifact snapshots(options.out_dir, "snapshots.jsonl", report);
  Artifact metrics(options.out_dir, "metrics.csv", report);
  Artifact detections(options.out_dir, "detections.csv", report);
  Artifact modes(options.out_dir, "modes.csv", report);
  metrics << "time,uav_id,discipline,inst_age,avg_age,delivered,dropped,energy_j\n";
  write_detection_header(detections.stream());
  modes << "time,redundant_fraction,emphasis\n";

  auto controller = ModeController::from_config(config);
  std::size_t switches = 0;
  std::map<std::string, std::size_t> emphasis_steps;
  std::size_t delivered = 0;
  double bits = 0.0;
  double energy = 0.0;
  const auto totals = run_mission(
      config, static_cast<std::size_t>(config.episode_steps), options.stop,
      [&](const World& w) { snapshots << snapshot_json(w).dump() << '\n'; },
      [&](const MissionStep& st) {
        snapshots << snapshot_json(st.world).dump() << '\n';
        const double t = st.world.time + st.world.dt;
        std::vector<RelevanceScore> scores;
        for (std::size_t u = 0; u < st.world.uavs.size(); ++u) {
          write_detection_rows(detections.stream(), st.sensed.detections[u]);
          const auto& sv = st.served[u];
          metrics << csv::format(t) << ',' << u << ',' << discipline << ',' << csv::format(st.aoi.age(u)) << ','
                  << csv::format(st.aoi.average(u)) << ',' << sv.delivered.size() << ',' << st.dropped[u] << ','
                  << csv::format(sv.energy_j) << '\n';
          delivered += sv.delivered.size();
          bits += sv.bits_sent;
          energy += sv.energy_j;
          for (const auto& s : st.sensed.scored[u]) scores.push_back(s.score);
        }
        const auto before = controller.emphasis;
        controller = mode_switch(controller, scores);
        if (controller.emphasis != before) ++switches;
        ++emphasis_steps[to_string(controller.emphasis)];
        modes << csv::format(t) << ',' << csv::format(controller.redundant_fraction()) << ','
              << to_string(controller.emphasis) << '\n';
      });
  if (totals.truncated) {
    snapshots << "{\"truncated\":true}\n";
    metrics << "# truncated\n";
    detections << "# truncated\n";
    modes << "# truncated\n";
  }
  snapshots.close();
  metrics.close();
  detections.close();
  modes.close();

  ordered_json summary;
  summary["command"] = "simulate";
  summary["truncated"] = totals.truncated;
  summary["steps"] = totals.steps;
  summary["detections"] = totals.detections;
  summary["mean_measurement_error"] =
      totals.detections ? totals.error_sum / static_cast<double>(totals.detections) : 0.0;
  summary["delivered"] = delivered;
  summary["bits_sent"] = bits;
  summary["transmit_energy_j"] = energy;
  summary["mode_switches"] = switches;
  summary["final_emphasis"] = to_string(controller.emphasis);
  summary["emphasis_steps"] = emphasis_steps;
  summary["config"] = config_echo(config);
  write_json(options.out_dir, "summary.json", summary, report);
  report.truncated = totals.truncated;
  return report;
}

// ---------------------------------------------------------------------------

RunReport run_training(const ScenarioConfig& config, int mode, const RunOptions& options) {
  RunReport report;
  Artifact curve(options.out_dir, "training_curve.csv", report);
  Artifact log(options.out_dir, "episode_log.jsonl", report);
  curve << "episode,agent_id,cum_reward,loss\n";
  MetricsFrame frame({"episode", "agent_id", "cum_reward", "loss"});
  TrainHooks hooks;
  hooks.stop = options.stop;
  hooks.log_every = static_cast<std::size_t>(config.episode_log_every);
  hooks.on_episode = [&](const EpisodeRecord& rec) {
    for (std::size_t i = 0; i < rec.rewards.size(); ++i) {
      curve << rec.episode << ',' << i << ',' << csv::format(rec.rewards[i]) << ',' << csv::format(rec.losses[i])
            << '\n';
      frame.append({static_cast<std::int64_t>(rec.episode), static_cast<std::int64_t>(i), rec.rewards[i],
                    rec.losses[i]});
    }
  };
  hooks.on_step = [&](const StepRecord& s) {
    ordered_json j;
    j["episode"] = s.episode;
    j["step"] = s.step;
    j["mode"] = s.mode;
    j["rewards"] = s.rewards;
    j["events"] = {{"detections", s.detections}, {"deliveries", s.deliveries}, {"drops", s.drops},
                   {"energy", s.energy_j}};
    log << j.dump() << '\n';
  };
  const auto result = mode == 1 ? train_mode1(config, hooks) : train_mode2(config, hooks);
  if (result.interrupted) {
    curve << "# truncated\n";
    log << "{\"truncated\":true}\n";
  }
  curve.close();
  log.close();
  const auto ckpt = options.out_dir / (mode == 1 ? "mode1_checkpoint.json" : "mode2_checkpoint.json");
  result.checkpoint.save(ckpt.string());
  report.artifacts.push_back(ckpt);
  report.artifacts.push_back(emit_plot_data(frame, PlotKind::TrainingCurves, options.out_dir / "plots"));

  ordered_json summary;
  summary["command"] = mode == 1 ? "train-mode1" : "train-mode2";
  summary["truncated"] = result.interrupted;
  summary["episodes"] = result.episodes.size();
  if (result.episodes.size() >= 10) {
    const auto [first, last] = decile_means(result.episodes);
    summary["first_decile_team_reward"] = first;
    summary["last_decile_team_reward"] = last;
  }
  summary["config"] = config_echo(config);
  write_json(options.out_dir, "summary.json", summary, report);
  report.truncated = result.interrupted;
  return report;
}

// ---------------------------------------------------------------------------

RunReport run_aoi(const ScenarioConfig& config, const RunOptions& options) {
  RunReport report;
  Artifact out(options.out_dir, "aoi_bench.csv", report);
  out << "lambda,discipline,avg_aoi,analytic_aoi,generated,delivered,dropped\n";
  MetricsFrame frame({"lambda", "discipline", "avg_aoi"});
  bool truncated = false;
  for (std::size_t li = 0; li < config.aoi_lambdas.size() && !truncated; ++li) {
    for (std::size_t di = 0; di < std::size(kAllDisciplines); ++di) {
      if (stopped(options.stop)) {
        truncated = true;
        break;
      }
      const double lambda = config.aoi_lambdas[li];
      const auto d = kAllDisciplines[di];
      const auto r = run_aoi_bench(lambda, config.aoi_mu, d, config.aoi_horizon,
                                   mix_seed(config.seed, 100 * li + di));
      const auto analytic = analytic_aoi(lambda, config.aoi_mu, d);
      out << csv::format(lambda) << ',' << to_string(d) << ',' << csv::format(r.avg_aoi) << ','
          << (analytic ? csv::format(*analytic) : std::string()) << ',' << r.generated << ',' << r.delivered << ','
          << r.dropped << '\n';
      frame.append({lambda, std::string(to_string(d)), r.avg_aoi});
    }
  }
  if (truncated) out << "# truncated\n";
  out.close();
  report.artifacts.push_back(emit_plot_data(frame, PlotKind::AoiCurves, options.out_dir / "plots"));
  report.truncated = truncated;
  return report;
}

RunReport run_cluster(const ScenarioConfig& config, const RunOptions& options) {
  RunReport report;
  const auto trajectories = load_input(options);
  if (trajectories.empty()) throw InvalidInput("cluster: input has no trajectories");
  std::vector<Trajectory> prepared;
  for (const auto& t : trajectories) prepared.push_back(prepare_for_comparison(t, static_cast<std::size_t>(config.comparison_length)));
  const auto matrix = pairwise_frechet(prepared);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(config.cluster_k), trajectories.size());
  const auto clustering = k_medoids(matrix, k, config.seed);
  Artifact out(options.out_dir, "clusters.csv", report);
  write_clusters_csv(out.stream(), clustering, trajectories);
  out.close();

  MetricsFrame frame({"traj_id", "cluster", "centroid_x", "centroid_y"});
  const auto summary_rows = cluster_report(clustering, trajectories);
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto c = static_cast<std::size_t>(clustering.assignment[i]);
    const std::string id = trajectories[i].label().empty() ? std::to_string(i) : trajectories[i].label();
    frame.append({id, static_cast<std::int64_t>(c), summary_rows[c].centroid.x, summary_rows[c].centroid.y});
  }
  report.artifacts.push_back(emit_plot_data(frame, PlotKind::ClusterMap, options.out_dir / "plots"));

  ordered_json summary;
  summary["command"] = "cluster";
  summary["trajectories"] = trajectories.size();
  summary["k"] = clustering.k;
  summary["cost"] = clustering.cost;
  summary["silhouette"] = silhouette_score(matrix, clustering);
  ordered_json clusters = ordered_json::array();
  for (const auto& c : summary_rows) {
    clusters.push_back({{"cluster", c.cluster},
                        {"size", c.size},
                        {"medoid", trajectories[c.medoid].label()},
                        {"centroid_x", c.centroid.x},
                        {"centroid_y", c.centroid.y}});
  }
  summary["clusters"] = clusters;
  write_json(options.out_dir, "summary.json", summary, report);
  return report;
}

RunReport run_frechet(const ScenarioConfig& config, const RunOptions& options) {
  (void)config;
  RunReport report;
  const auto trajectories = load_input(options);
  if (trajectories.empty()) throw InvalidInput("frechet: input has no trajectories");
  const auto matrix = kernels::frechet_matrix_parallel(trajectories);
  Artifact out(options.out_dir, "frechet.csv", report);
  out << "a,b,distance\n";
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    for (std::size_t j = i + 1; j < trajectories.size(); ++j) {
      out << trajectories[i].label() << ',' << trajectories[j].label() << ',' << csv::format(matrix(i, j)) << '\n';
    }
  }
  out.close();
  return report;
}

RunReport run_scale(const ScenarioConfig& config, const RunOptions& options) {
  RunReport report;
  Artifact out(options.out_dir, "scale_sweep.csv", report);
  out << "uav_count,target_count,steps,detections,mean_error,error_std,sensor_sigma\n";
  std::vector<ScaleRow> rows;
  bool truncated = false;
  for (auto count : config.scale_counts) {
    if (stopped(options.stop)) {
      truncated = true;
      break;
    }
    const auto row = scale_point(config, count, options.stop);
    if (row.steps < static_cast<std::size_t>(config.scale_steps)) {
      truncated = true;
      break;
    }
    out << row.uav_count << ',' << config.target_count << ',' << row.steps << ',' << row.detections << ','
        << csv::format(row.mean_error) << ',' << csv::format(row.error_std) << ','
        << csv::format(config.sensor_noise_sigma) << '\n';
    rows.push_back(row);
  }
  if (truncated) out << "# truncated\n";
  out.close();
  // Wall-clock measurements differ between runs, so they live apart from the metrics.
  Artifact timing(options.out_dir, "timing.csv", report);
  timing << "uav_count,seconds_per_step\n";
  for (const auto& r : rows) timing << r.uav_count << ',' << csv::format(r.seconds_per_step) << '\n';
  timing.close();
  report.truncated = truncated;
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<SensedUpdate> record_sensed_stream(const ScenarioConfig& config, std::size_t steps) {
  World world = init_world(config);
  SensingNetwork sensing(config, world.uavs.size());
  std::vector<SensedUpdate> stream;
  for (std::size_t s = 0; s < steps; ++s) {
    advance_world(world, planner_commands(world, sensing));
    const auto sensed = sensing.sense(world, true);
    for (std::size_t u = 0; u < world.uavs.size(); ++u) {
      for (const auto& st : sensed.scored[u]) {
        stream.push_back({s, world.time, static_cast<int>(u), st.track_id, st.score.distance});
      }
    }
  }
  return stream;
}

ReplayTotals replay_gated_stream(const ScenarioConfig& config, std::span<const SensedUpdate> stream,
                                 double threshold, std::size_t steps) {
  const auto n = static_cast<std::size_t>(config.uav_count);
  std::vector<GatedUplink> uplinks;
  std::vector<Rng> rngs;
  for (std::size_t u = 0; u < n; ++u) {
    uplinks.emplace_back(config, static_cast<int>(u), threshold);
    rngs.emplace_back(mix_seed(config.seed, 4000 + u));
  }
  const Environment env{config.arena_width, config.arena_height, config.sensor_noise_sigma, config.snr_base_db,
                        config.snr_weather_penalty_db, config.seed};
  ReplayTotals totals;
  std::size_t next = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double now = config.dt * static_cast<double>(s + 1);
    while (next < stream.size() && stream[next].step == s) {
      const auto& e = stream[next++];
      const RelevanceScore score{e.distance, e.distance > threshold};
      if (score.is_novel || !config.gating) {
        ++totals.full_packets;
      } else {
        ++totals.summary_packets;
      }
      uplinks.at(static_cast<std::size_t>(e.uav)).submit(e.track_id, score, e.time);
    }
    for (std::size_t u = 0; u < n; ++u) {
      const auto r = uplinks[u].step(env.link_snr(), config.dt, now, rngs[u]);
      totals.bits_sent += r.bits_sent;
      totals.high_bits_sub_threshold += r.high_bits_sub_threshold;
      totals.delivered += r.delivered.size();
    }
  }
  return totals;
}

ScaleRow scale_point(const ScenarioConfig& config, std::int64_t uav_count, const std::atomic<bool>* stop) {
  ScenarioConfig c = config;
  c.uav_count = uav_count;
  validate(c);
  ScaleRow row;
  row.uav_count = uav_count;
  const auto start = std::chrono::steady_clock::now();
  const auto totals = run_mission(c, static_cast<std::size_t>(c.scale_steps), stop, {}, {});
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  row.steps = totals.steps;
  row.detections = totals.detections;
  if (totals.detections > 0) {
    const double n = static_cast<double>(totals.detections);
    row.mean_error = totals.error_sum / n;
    row.error_std = std::sqrt(std::max(0.0, totals.error_sq_sum / n - row.mean_error * row.mean_error));
  }
  row.seconds_per_step = totals.steps ? elapsed / static_cast<double>(totals.steps) : 0.0;
  return row;
}

RunReport run_scenario(const ScenarioConfig& config, Command command, const RunOptions& options) {
  validate(config);
  prepare_dir(options.out_dir);
  switch (command) {
    case Command::Simulate: return run_simulate(config, options);
    case Command::TrainMode1: return run_training(config, 1, options);
    case Command::TrainMode2: return run_training(config, 2, options);
    case Command::AoiBench: return run_aoi(config, options);
    case Command::Cluster: return run_cluster(config, options);
    case Command::Frechet: return run_frechet(config, options);
    case Command::ScaleSweep: return run_scale(config, options);
  }
  throw UsageError("unhandled command");
}

}  // namespace adaptnet
