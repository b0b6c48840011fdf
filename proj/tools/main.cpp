#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddcur/harness.hpp"
#include "ddcur/version.hpp"

namespace fs = std::filesystem;
using namespace ddcur;

namespace {

Method method_from_flag(const std::string& name) {
  if (name == "curriculum") return Method::curriculum;
  if (name == "uniform") return Method::uniform_baseline;
  throw ConfigError("unknown method: " + name);
}

void write_csv(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << body;
}

void print_run_summary(const RunResult& run) {
  const double final_success =
      run.metrics.rows.empty() ? 0.0 : run.metrics.rows.back().success_rate;
  std::printf("%s seed=%llu: %lld steps, %lld episodes, %lld ddf trains, "
              "final success %.3f\n",
              to_string(run.method),
              static_cast<unsigned long long>(run.seed),
              static_cast<long long>(run.env_steps),
              static_cast<long long>(run.episode_count),
              static_cast<long long>(run.ddf_train_count), final_success);
}

int cmd_train(const std::string& config_path,
              const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& method,
              const std::optional<std::string>& out) {
  ExperimentConfig config = load_config_file(config_path);
  if (seed) config.seeds = {*seed};
  if (method) config.method = method_from_flag(*method);
  if (out) config.out_dir = *out;
  config.validate();
  const std::uint64_t run_seed = config.seeds.front();
  const RunResult run = run_training(config, run_seed);
  const fs::path out_dir = config.out_dir;
  write_run_files(config, run, out_dir);
  std::ostringstream command;
  command << "train --config " << config_path << " --seed " << run_seed
          << " --method " << to_string(config.method) << " --out "
          << config.out_dir;
  write_manifest(config, out_dir, command.str());
  print_run_summary(run);
  std::printf("wrote %s\n", (out_dir / run_csv_name(run.method, run_seed)).c_str());
  return 0;
}

int cmd_suite(const std::string& config_path, const std::string& out) {
  ExperimentConfig config = load_config_file(config_path);
  config.out_dir = out;
  config.validate();
  const fs::path out_dir = out;
  fs::create_directories(out_dir);
  SuiteResult suite;
  for (const Method method : {Method::curriculum, Method::uniform_baseline}) {
    ExperimentConfig run_config = config;
    run_config.method = method;
    for (const std::uint64_t seed : config.seeds) {
      std::fprintf(stderr, "running %s seed %llu...\n", to_string(method),
                   static_cast<unsigned long long>(seed));
      suite.runs.push_back(run_training(run_config, seed));
      const RunResult& run = suite.runs.back();
      // Flush per-run files immediately so earlier results survive a
      // failed later seed.
      write_csv(out_dir / run_csv_name(method, seed), metrics_to_csv(run.metrics));
      write_csv(out_dir / episodes_csv_name(method, seed),
                episodes_to_csv(run.episodes));
      print_run_summary(run);
    }
  }
  suite.aggregate = aggregate_success(suite.runs);
  suite.thresholds = threshold_summary(suite.runs);
  write_suite_files(config, suite, out_dir);
  write_manifest(config, out_dir,
                 "suite --config " + config_path + " --out " + out);
  for (const ThresholdRow& row : suite.thresholds) {
    if (!row.is_median || row.threshold != 0.8) continue;
    std::printf("%s median steps to sustained 0.8: %s\n", to_string(row.method),
                row.steps_to_sustained
                    ? std::to_string(*row.steps_to_sustained).c_str()
                    : "not reached");
  }
  std::printf("wrote %s\n", (out_dir / "aggregate.csv").c_str());
  return 0;
}

std::vector<std::pair<Vec, Vec>> load_pool_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pool file: " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw IoError("pool file empty: " + path.string());
  int state_dim = 0, goal_dim = 0;
  {
    std::stringstream ss(header);
    for (std::string col; std::getline(ss, col, ',');) {
      if (col.rfind("state_", 0) == 0) ++state_dim;
      else if (col.rfind("agoal_", 0) == 0) ++goal_dim;
      else throw IoError("pool file: unexpected column " + col);
    }
  }
  if (state_dim < 1 || goal_dim < 1) {
    throw IoError("pool file: missing state/agoal columns");
  }
  std::vector<std::pair<Vec, Vec>> pool;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Vec state(state_dim), agoal(goal_dim);
    std::stringstream ss(line);
    std::string cell;
    for (int d = 0; d < state_dim + goal_dim; ++d) {
      if (!std::getline(ss, cell, ',')) {
        throw IoError("pool file: short row in " + path.string());
      }
      double value = 0.0;
      const char* end = cell.data() + cell.size();
      if (std::from_chars(cell.data(), end, value).ptr != end) {
        throw IoError("pool file: bad number '" + cell + "'");
      }
      (d < state_dim ? state[d] : agoal[d - state_dim]) = value;
    }
    pool.emplace_back(std::move(state), std::move(agoal));
  }
  return pool;
}

int cmd_inspect_goals(const std::string& checkpoint, int n_goals) {
  const fs::path dir = checkpoint;
  if (!fs::is_directory(dir)) {
    throw ConfigError("checkpoint directory not found: " + checkpoint);
  }
  // Suite runs nest snapshot directories one level below the manifest.
  fs::path manifest = dir / "manifest";
  if (!fs::exists(manifest) && fs::exists(dir.parent_path() / "manifest")) {
    manifest = dir.parent_path() / "manifest";
  }
  const ExperimentConfig config = load_config_file(manifest);
  const auto env = make_env(config);
  std::vector<std::int64_t> steps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("pool_", 0) != 0 || name.size() < 10 ||
        name.substr(name.size() - 4) != ".csv") {
      continue;
    }
    const std::string digits = name.substr(5, name.size() - 9);
    std::int64_t step = 0;
    const char* end = digits.data() + digits.size();
    if (std::from_chars(digits.data(), end, step).ptr == end) {
      steps.push_back(step);
    }
  }
  if (steps.empty()) {
    throw ConfigError("no goal snapshots under " + checkpoint +
                      " (run train with snapshot_every > 0)");
  }
  std::sort(steps.begin(), steps.end());
  std::printf("%10s %6s %9s %6s %6s  %-34s %s\n", "env_steps", "goals",
              "mean_dist", "min", "max", "sources", "bins");
  for (const std::int64_t step : steps) {
    const auto pool = load_pool_csv(dir / ("pool_" + std::to_string(step) + ".csv"));
    std::optional<DdfModel> ddf;
    const fs::path ckpt = dir / ("ddf_" + std::to_string(step) + ".ckpt");
    if (fs::exists(ckpt)) ddf = load_ddf_file(ckpt);
    Rng rng(0, static_cast<std::uint64_t>(step));
    const auto goals =
        draw_goals_from_pool(pool, ddf ? &*ddf : nullptr, *env, config.goalgen,
                             env->start_state(), n_goals, rng);
    const GoalDifficultyReport report =
        difficulty_report_for_env(goals, *env, env->start_state());
    std::string sources;
    for (const auto& [source, count] : report.source_histogram) {
      if (!sources.empty()) sources += ' ';
      sources += std::string(to_string(source)) + ":" + std::to_string(count);
    }
    std::string bins;
    for (const auto& [bin, count] : report.bin_histogram) {
      if (!bins.empty()) bins += ' ';
      bins += std::to_string(bin) + ":" + std::to_string(count);
    }
    std::printf("%10lld %6d %9.2f %6.1f %6.1f  %-34s %s\n",
                static_cast<long long>(step), report.count,
                report.mean_distance, report.min_distance, report.max_distance,
                sources.c_str(), bins.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-curriculum trainer with a learned dynamical distance"};
  app.set_version_flag("--version", std::string("ddcur ") + kVersion);
  app.require_subcommand(1);

  std::string config_path, out, method, checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method_opt, out_opt;
  int n_goals = 50;

  CLI::App* train = app.add_subcommand("train", "run one training job");
  train->add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  train
      ->add_option_function<std::uint64_t>(
          "--seed", [&seed](std::uint64_t v) { seed = v; },
          "override the config's seed list with one seed")
      ->expected(1);
  train->add_option("--method", method, "goal sampling method")
      ->check(CLI::IsMember({"curriculum", "uniform"}));
  train->add_option("--out", out, "output directory");

  CLI::App* suite = app.add_subcommand(
      "suite", "run both methods across every seed and aggregate");
  suite->add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  suite->add_option("--out", out, "output directory")->required();

  CLI::App* inspect = app.add_subcommand(
      "inspect-goals", "re-draw goals from saved snapshots and report difficulty");
  inspect->add_option("--checkpoint", checkpoint, "train output directory")
      ->required();
  inspect->add_option("--n", n_goals, "goals to draw per snapshot")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a config error
  }

  try {
    if (train->parsed()) {
      if (train->count("--method")) method_opt = method;
      if (train->count("--out")) out_opt = out;
      return cmd_train(config_path, seed, method_opt, out_opt);
    }
    if (suite->parsed()) return cmd_suite(config_path, out);
    if (inspect->parsed()) return cmd_inspect_goals(checkpoint, n_goals);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
