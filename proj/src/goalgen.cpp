#include "ddcur/goalgen.hpp"

#include <algorithm>
#include <limits>

namespace ddcur {

const char* to_string(GoalSource source) {
  switch (source) {
    case GoalSource::curriculum: return "curriculum";
    case GoalSource::uniform_fallback: return "uniform_fallback";
    case GoalSource::uniform_mix: return "uniform_mix";
    case GoalSource::warmup: return "warmup";
  }
  throw ConfigError("to_string: unknown goal source");
}

BinPredictor make_predictor(const DdfModel& model) {
  return [&model](const Vec& s0, const Vec& s) {
    return predict_bin(model, s0, s).first;
  };
}

GoalSample select_goal_from_candidates(
    const Vec& s0, const std::vector<std::pair<Vec, Vec>>& candidates,
    const BinPredictor& predictor, const GoalEnv& env,
    const GoalGenConfig& config, Rng& rng) {
  if (config.target_bins < 1) throw ConfigError("goalgen: target_bins must be >= 1");
  if (config.min_candidates < 1) {
    throw ConfigError("goalgen: min_candidates must be >= 1");
  }
  if (candidates.empty()) {
    return {env.sample_uniform_goal(rng), GoalSource::uniform_fallback,
            std::nullopt, 0};
  }
  std::vector<int> bins(candidates.size());
  int top_bin = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bins[i] = predictor(s0, candidates[i].first);
    top_bin = std::max(top_bin, bins[i]);
  }
  // Candidates in the target_bins furthest bins; widen downward while
  // the pool is thinner than min_candidates.
  int lowest = top_bin - config.target_bins + 1;
  std::vector<std::size_t> selected;
  for (;;) {
    selected.clear();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (bins[i] >= lowest) selected.push_back(i);
    }
    if (static_cast<int>(selected.size()) >= config.min_candidates ||
        lowest <= 1) {
      break;
    }
    --lowest;
  }
  const int pool_size = static_cast<int>(selected.size());
  while (!selected.empty()) {
    const std::size_t pick = rng.index(selected.size());
    const std::size_t idx = selected[pick];
    const Vec& goal = candidates[idx].second;
    if (env.goal_valid(goal)) {
      return {goal, GoalSource::curriculum, bins[idx], pool_size};
    }
    selected.erase(selected.begin() + pick);
  }
  return {env.sample_uniform_goal(rng), GoalSource::uniform_fallback,
          std::nullopt, 0};
}

GoalSample generate_goal(const Vec& s0, const ReplayBuffer& buffer,
                         const BinPredictor& predictor, const GoalEnv& env,
                         const GoalGenConfig& config, Rng& rng) {
  if (config.candidate_batch_size < 1) {
    throw ConfigError("goalgen: candidate_batch_size must be >= 1");
  }
  if (config.uniform_mix_prob < 0.0 || config.uniform_mix_prob > 1.0) {
    throw ConfigError("goalgen: uniform_mix_prob must be in [0, 1]");
  }
  if (buffer.size() < config.min_buffer_steps) {
    return {env.sample_uniform_goal(rng), GoalSource::warmup, std::nullopt, 0};
  }
  if (rng.bernoulli(config.uniform_mix_prob)) {
    return {env.sample_uniform_goal(rng), GoalSource::uniform_mix, std::nullopt,
            0};
  }
  const auto candidates = buffer.sample_states(config.candidate_batch_size, rng);
  return select_goal_from_candidates(s0, candidates, predictor, env, config, rng);
}

GoalSample generate_goal(const Vec& s0, const ReplayBuffer& buffer,
                         const DdfModel& model, const GoalEnv& env,
                         const GoalGenConfig& config, Rng& rng) {
  return generate_goal(s0, buffer, make_predictor(model), env, config, rng);
}

GoalDifficultyReport goal_difficulty_report(const std::vector<GoalSample>& goals,
                                            const GridNavEnv& env,
                                            const Vec& s0) {
  const Cell from = env.decode_point(s0);
  if (env.is_wall(from)) throw InvalidCellError("difficulty report: s0 blocked");
  GoalDifficultyReport report;
  report.count = static_cast<int>(goals.size());
  if (goals.empty()) return report;
  double sum = 0.0;
  report.min_distance = std::numeric_limits<double>::infinity();
  report.max_distance = -std::numeric_limits<double>::infinity();
  for (const GoalSample& g : goals) {
    if (!env.goal_valid(g.goal)) {
      throw InvalidGoalError("difficulty report: goal outside the grid");
    }
    const auto d = env.oracle_distance(from, env.decode_point(g.goal));
    if (!d) throw InvalidGoalError("difficulty report: unreachable goal");
    const double dist = static_cast<double>(*d);
    sum += dist;
    report.min_distance = std::min(report.min_distance, dist);
    report.max_distance = std::max(report.max_distance, dist);
    if (g.predicted_bin) report.bin_histogram[*g.predicted_bin] += 1;
    report.source_histogram[g.source] += 1;
  }
  report.mean_distance = sum / report.count;
  return report;
}

}  // namespace ddcur
