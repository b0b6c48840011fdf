#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ddcur/ddf.hpp"
#include "ddcur/envs.hpp"
#include "ddcur/replay.hpp"

namespace ddcur {

struct GoalGenConfig {
  int candidate_batch_size = 256;
  /// How many of the top predicted-distance bins count as "furthest".
  int target_bins = 1;
  /// The selection widens down one bin at a time until it holds at
  /// least this many candidates (guards against single outliers).
  /// 1 disables the relaxation.
  int min_candidates = 4;
  /// Probability of bypassing the generator with a uniform goal,
  /// keeping goal-space coverage. 0 gives the pure furthest-bin rule,
  /// 1 recovers the uniform baseline.
  double uniform_mix_prob = 0.35;
  /// Below this many stored transitions every goal is uniform.
  std::int64_t min_buffer_steps = 2000;
};

enum class GoalSource { curriculum, uniform_fallback, uniform_mix, warmup };

const char* to_string(GoalSource source);

struct GoalSample {
  Vec goal;
  GoalSource source = GoalSource::warmup;
  std::optional<int> predicted_bin;   // present iff source == curriculum
  int candidate_count_in_bin = 0;     // size of the selected candidate set
};

/// Pluggable distance-bin predictor: (s0, s) -> bin index in [1, B].
using BinPredictor = std::function<int(const Vec& s0, const Vec& s)>;

BinPredictor make_predictor(const DdfModel& model);

/// Furthest-bin selection over an explicit candidate pool of
/// (state, achieved_goal) pairs. Used directly by offline snapshot
/// inspection; generate_goal draws the pool from the replay buffer.
GoalSample select_goal_from_candidates(
    const Vec& s0, const std::vector<std::pair<Vec, Vec>>& candidates,
    const BinPredictor& predictor, const GoalEnv& env,
    const GoalGenConfig& config, Rng& rng);

/// The curriculum step: warm-up and uniform-mix branches fall back to
/// uniform goals; otherwise candidate states are drawn from the
/// buffer, ranked by predicted distance from s0, and a goal is chosen
/// uniformly from the furthest occupied bins.
GoalSample generate_goal(const Vec& s0, const ReplayBuffer& buffer,
                         const BinPredictor& predictor, const GoalEnv& env,
                         const GoalGenConfig& config, Rng& rng);
GoalSample generate_goal(const Vec& s0, const ReplayBuffer& buffer,
                         const DdfModel& model, const GoalEnv& env,
                         const GoalGenConfig& config, Rng& rng);

/// Exact difficulty statistics of sampled goals relative to s0's cell,
/// via the grid's shortest-path oracle.
struct GoalDifficultyReport {
  int count = 0;
  double mean_distance = 0.0;
  double min_distance = 0.0;
  double max_distance = 0.0;
  std::map<int, int> bin_histogram;          // predicted bin -> count
  std::map<GoalSource, int> source_histogram;
};

GoalDifficultyReport goal_difficulty_report(const std::vector<GoalSample>& goals,
                                            const GridNavEnv& env,
                                            const Vec& s0);

}  // namespace ddcur
