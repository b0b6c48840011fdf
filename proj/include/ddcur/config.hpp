#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ddcur/goalgen.hpp"
#include "ddcur/replay.hpp"

namespace ddcur {

enum class EnvChoice { gridnav, pointreach };
enum class Method { curriculum, uniform_baseline };

const char* to_string(EnvChoice env);
const char* to_string(Method method);

struct GridNavParams {
  int width = 20;
  int height = 20;
  int horizon = 60;
  std::string layout = "two_room";  // two_room | open
  std::string map_file;             // overrides layout when set
};

struct PointReachParams {
  double max_step = 0.03;
  double epsilon = 0.05;
  int horizon = 50;
};

struct ReplayParams {
  std::int64_t capacity = 100000;
  int her_k = 4;
};

struct DdfParams {
  int bins = 8;
  std::vector<int> hidden = {128, 128};
  int pairs_per_retrain = 10000;
  int epochs = 5;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::int64_t retrain_interval = 5000;  // env steps between retrains
  std::int64_t recent_steps = 20000;     // train on this many recent steps
  double holdout_fraction = 0.1;         // held out for accuracy telemetry
};

struct AgentParams {
  std::vector<int> hidden = {64, 64};
  double gamma = 0.98;
  double learning_rate = 1e-3;
  int batch_size = 64;
  double tau = 0.005;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_anneal_frac = 0.3;  // fraction of total_env_steps
  double noise_scale = 0.1;
  std::int64_t learn_start = 1000;  // buffer size before updates begin
  int updates_per_step = 1;
};

/// Everything a run needs; every field can be set from the config
/// file and unknown keys there are errors.
struct ExperimentConfig {
  EnvChoice env = EnvChoice::gridnav;
  Method method = Method::curriculum;
  std::int64_t total_env_steps = 200000;
  std::int64_t eval_every = 2000;
  int eval_goal_count = 100;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  std::int64_t snapshot_every = 0;  // 0 disables goal-distribution snapshots
  int snapshot_goal_count = 100;
  int snapshot_pool_size = 2048;  // candidate states saved per snapshot
  std::string out_dir = "runs";

  GridNavParams gridnav;
  PointReachParams pointreach;
  ReplayParams replay;
  DdfParams ddf;
  GoalGenConfig goalgen;
  AgentParams agent;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// INI-style key-value format, one flat section per module. Unknown
/// sections or keys are errors; a [meta] section is accepted and
/// ignored so manifests stay loadable.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Serializes the fully resolved configuration (manifest body).
std::string serialize_config(const ExperimentConfig& config);

}  // namespace ddcur
