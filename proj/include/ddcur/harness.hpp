#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddcur/agents.hpp"
#include "ddcur/config.hpp"
#include "ddcur/ddf.hpp"
#include "ddcur/goalgen.hpp"

namespace ddcur {

/// One evaluation checkpoint of a run. Aggregates cover the training
/// episodes since the previous checkpoint.
struct MetricsRow {
  std::int64_t env_steps = 0;
  double success_rate = 0.0;
  double mean_episode_return = 0.0;
  /// Mean start-to-goal oracle distance of the window's training
  /// goals (shortest-path steps on the grid, Euclidean in the arena).
  double mean_goal_oracle_distance = 0.0;
  /// Held-out exact-bin accuracy at the most recent distance-model
  /// retrain; negative when no retrain has happened yet.
  double ddf_holdout_accuracy = -1.0;
  /// Goal counts by source, indexed by GoalSource: curriculum,
  /// uniform_fallback, uniform_mix, warmup.
  std::array<std::int64_t, 4> goal_source_counts = {0, 0, 0, 0};
};

struct RunMetrics {
  std::vector<MetricsRow> rows;
};

/// Per-episode goal telemetry.
struct EpisodeRecord {
  std::int64_t episode_index = 0;
  std::int64_t env_steps_before = 0;
  Vec goal;
  GoalSource source = GoalSource::warmup;
  std::optional<int> predicted_bin;
  double oracle_distance = 0.0;
  int length = 0;
  double episode_return = 0.0;
  bool success = false;
};

/// Goal-distribution snapshot: goals drawn from the generator outside
/// the training stream, with everything needed to re-generate offline.
struct GoalSnapshot {
  std::int64_t env_steps = 0;
  std::vector<GoalSample> goals;
  GoalDifficultyReport report;
  std::vector<std::pair<Vec, Vec>> candidate_pool;  // (state, achieved_goal)
  std::string ddf_blob;  // serialized distance model, empty before first train
};

struct RunResult {
  Method method = Method::curriculum;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::vector<EpisodeRecord> episodes;
  std::vector<GoalSnapshot> snapshots;
  std::int64_t ddf_train_count = 0;
  std::int64_t env_steps = 0;
  std::int64_t episode_count = 0;
};

/// Executes the full training loop for one (config, seed) pair:
/// per episode a goal (curriculum or uniform), a rollout, a buffer
/// push; per environment step an off-policy update after warm-up;
/// distance-model retrains on the configured interval; an evaluation
/// row every eval_every steps. Fully deterministic.
RunResult run_training(const ExperimentConfig& config, std::uint64_t seed);

/// Standalone goal-distribution probe; does not consume training rng
/// or mutate the buffer. ddf may be null (pre-warm-up).
GoalSnapshot snapshot_goal_distribution(const ReplayBuffer& buffer,
                                        const DdfModel* ddf, GoalEnv& env,
                                        const GoalGenConfig& config,
                                        const Vec& s0, int n_goals,
                                        int pool_size,
                                        std::int64_t env_steps, Rng rng);

/// Generator draws against an explicit candidate pool instead of a
/// live buffer: warm-up tags without a model, the uniform mix, and
/// otherwise furthest-bin selection over candidate_batch_size draws
/// from the pool. Offline counterpart of the in-run generator.
std::vector<GoalSample> draw_goals_from_pool(
    const std::vector<std::pair<Vec, Vec>>& pool, const DdfModel* ddf,
    GoalEnv& env, const GoalGenConfig& config, const Vec& s0, int n_goals,
    Rng& rng);

struct AggregateRow {
  Method method = Method::curriculum;
  std::int64_t env_steps = 0;
  double success_median = 0.0;
  double success_mean = 0.0;
  double success_std = 0.0;
};

struct ThresholdRow {
  Method method = Method::curriculum;
  std::uint64_t seed = 0;  // ignored for the median rows
  bool is_median = false;
  double threshold = 0.0;
  std::optional<std::int64_t> steps_to_first;
  std::optional<std::int64_t> steps_to_sustained;
};

struct SuiteResult {
  std::vector<RunResult> runs;
  std::vector<AggregateRow> aggregate;
  std::vector<ThresholdRow> thresholds;
};

/// Runs every (method, seed) pair of the config — both methods share
/// the seed list — and aggregates per-eval-point statistics plus a
/// steps-to-threshold summary for thresholds {0.5, 0.8, 0.9}.
SuiteResult run_suite(const ExperimentConfig& config);

/// Aggregation pieces of run_suite, usable on incrementally collected
/// runs (per-eval-point stats use the population deviation, so a
/// single seed aggregates to itself with deviation 0).
std::vector<AggregateRow> aggregate_success(const std::vector<RunResult>& runs);
std::vector<ThresholdRow> threshold_summary(const std::vector<RunResult>& runs);

/// First eval point at/above the threshold, and the first point from
/// which every later point stays at/above it.
std::optional<std::int64_t> steps_to_threshold(const RunMetrics& metrics,
                                               double threshold);
std::optional<std::int64_t> steps_to_sustained_threshold(
    const RunMetrics& metrics, double threshold);

/// File emission (CSV, RFC-4180 quoting; see README for schemas).
void write_run_files(const ExperimentConfig& config, const RunResult& run,
                     const std::filesystem::path& out_dir);
void write_suite_files(const ExperimentConfig& config, const SuiteResult& suite,
                       const std::filesystem::path& out_dir);
void write_manifest(const ExperimentConfig& config,
                    const std::filesystem::path& out_dir,
                    const std::string& command);

std::string run_csv_name(Method method, std::uint64_t seed);
std::string episodes_csv_name(Method method, std::uint64_t seed);

/// In-memory CSV renderings (the exact bytes the writers emit).
std::string metrics_to_csv(const RunMetrics& metrics);
std::string episodes_to_csv(const std::vector<EpisodeRecord>& episodes);
std::string snapshot_goals_to_csv(const GoalSnapshot& snapshot);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);
std::string thresholds_to_csv(const std::vector<ThresholdRow>& rows);

/// Environment factory shared by the trainer, the CLI and offline
/// inspection.
std::unique_ptr<GoalEnv> make_env(const ExperimentConfig& config);

/// goal_difficulty_report via the grid oracle when env is a grid,
/// Euclidean goal-space distance otherwise.
GoalDifficultyReport difficulty_report_for_env(
    const std::vector<GoalSample>& goals, const GoalEnv& env, const Vec& s0);

}  // namespace ddcur
