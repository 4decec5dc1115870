// adaptnet <command> --config <path> --out <dir> [--seed N] [--input csv]
//
// Exit status: 0 success, 2 configuration error, 1 anything else.
// ADAPTNET_LOG=quiet|info|debug controls stderr verbosity (default info).

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adaptnet/config.hpp"
#include "adaptnet/error.hpp"
#include "adaptnet/runner.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

Level log_level() {
  const char* env = std::getenv("ADAPTNET_LOG");
  if (!env) return Level::Info;
  const std::string v(env);
  if (v == "quiet" || v == "0") return Level::Quiet;
  if (v == "debug" || v == "2") return Level::Debug;
  return Level::Info;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptnet: multi-UAV sensing and communication simulator"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string input;
  std::uint64_t seed = 0;
  app.add_option("command", command, "simulate | train-mode1 | train-mode2 | aoi-bench | cluster | frechet | scale-sweep")
      ->required();
  app.add_option("--config", config_path, "scenario JSON")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--input", input, "trajectory CSV (id,x,y,t) for cluster and frechet");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const Level level = log_level();
  std::signal(SIGINT, on_sigint);
  try {
    const auto cmd = adaptnet::parse_command(command);
    auto config = adaptnet::load_config_file(config_path);
    if (*seed_opt) config.seed = seed;
    adaptnet::RunOptions options;
    options.out_dir = out_dir;
    if (!input.empty()) options.input = input;
    options.stop = &g_stop;
    if (level >= Level::Debug) std::cerr << "adaptnet: resolved config\n" << adaptnet::serialize(config) << '\n';
    const auto report = adaptnet::run_scenario(config, cmd, options);
    if (level >= Level::Info) {
      for (const auto& p : report.artifacts) std::cerr << "wrote " << p.string() << '\n';
    }
    if (report.truncated) {
      std::cerr << "adaptnet: interrupted; partial artifacts are marked as truncated\n";
      return 1;
    }
    return 0;
  } catch (const adaptnet::ConfigError& e) {
    std::cerr << "adaptnet: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "adaptnet: " << e.what() << '\n';
    return 1;
  }
}
