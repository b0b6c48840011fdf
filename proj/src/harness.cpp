#include "ddcur/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddcur/version.hpp"
#include "text_format.hpp"

namespace ddcur {

namespace {

// Independent rng streams per consumer, so e.g. toggling the goal
// generator cannot perturb the action or relabeling sequences.
enum Stream : std::uint64_t {
  kStreamEnv = 0,
  kStreamAgentInit = 1,
  kStreamAct = 2,
  kStreamHer = 3,
  kStreamDdf = 4,
  kStreamGoal = 5,
  kStreamEval = 6,
  kStreamSnapshotBase = 1000,
};

int env_horizon(const ExperimentConfig& config) {
  return config.env == EnvChoice::gridnav ? config.gridnav.horizon
                                          : config.pointreach.horizon;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline surprises
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

GoalDifficultyReport euclidean_difficulty_report(
    const std::vector<GoalSample>& goals, const GoalEnv& env, const Vec& s0) {
  GoalDifficultyReport report;
  report.count = static_cast<int>(goals.size());
  if (goals.empty()) return report;
  const Vec from = env.achieved_goal(s0);
  double sum = 0.0;
  report.min_distance = std::numeric_limits<double>::infinity();
  report.max_distance = -std::numeric_limits<double>::infinity();
  for (const GoalSample& g : goals) {
    const double dist = goal_distance(from, g.goal);
    sum += dist;
    report.min_distance = std::min(report.min_distance, dist);
    report.max_distance = std::max(report.max_distance, dist);
    if (g.predicted_bin) report.bin_histogram[*g.predicted_bin] += 1;
    report.source_histogram[g.source] += 1;
  }
  report.mean_distance = sum / report.count;
  return report;
}

}  // namespace

GoalDifficultyReport difficulty_report_for_env(
    const std::vector<GoalSample>& goals, const GoalEnv& env, const Vec& s0) {
  if (const auto* grid = dynamic_cast<const GridNavEnv*>(&env)) {
    return goal_difficulty_report(goals, *grid, s0);
  }
  return euclidean_difficulty_report(goals, env, s0);
}

std::unique_ptr<GoalEnv> make_env(const ExperimentConfig& config) {
  if (config.env == EnvChoice::gridnav) {
    const GridNavParams& p = config.gridnav;
    if (!p.map_file.empty()) {
      return std::make_unique<GridNavEnv>(
          GridNavEnv::from_map_file(p.map_file, p.horizon));
    }
    if (p.layout == "open") {
      return std::make_unique<GridNavEnv>(
          GridNavEnv::open(p.width, p.height, p.horizon));
    }
    return std::make_unique<GridNavEnv>(
        GridNavEnv::two_room(p.width, p.height, p.horizon));
  }
  const PointReachParams& p = config.pointreach;
  return std::make_unique<PointReachEnv>(p.max_step, p.horizon, p.epsilon);
}

std::vector<GoalSample> draw_goals_from_pool(
    const std::vector<std::pair<Vec, Vec>>& pool, const DdfModel* ddf,
    GoalEnv& env, const GoalGenConfig& config, const Vec& s0, int n_goals,
    Rng& rng) {
  if (n_goals < 0) throw ConfigError("draw_goals_from_pool: n_goals must be >= 0");
  const BinPredictor predictor = ddf ? make_predictor(*ddf) : BinPredictor{};
  std::vector<GoalSample> goals;
  goals.reserve(n_goals);
  for (int i = 0; i < n_goals; ++i) {
    if (!ddf || pool.empty()) {
      goals.push_back(
          {env.sample_uniform_goal(rng), GoalSource::warmup, std::nullopt, 0});
      continue;
    }
    if (rng.bernoulli(config.uniform_mix_prob)) {
      goals.push_back({env.sample_uniform_goal(rng), GoalSource::uniform_mix,
                       std::nullopt, 0});
      continue;
    }
    std::vector<std::pair<Vec, Vec>> candidates;
    candidates.reserve(config.candidate_batch_size);
    for (int c = 0; c < config.candidate_batch_size; ++c) {
      candidates.push_back(pool[rng.index(pool.size())]);
    }
    goals.push_back(
        select_goal_from_candidates(s0, candidates, predictor, env, config, rng));
  }
  return goals;
}

GoalSnapshot snapshot_goal_distribution(const ReplayBuffer& buffer,
                                        const DdfModel* ddf, GoalEnv& env,
                                        const GoalGenConfig& config,
                                        const Vec& s0, int n_goals,
                                        int pool_size, std::int64_t env_steps,
                                        Rng rng) {
  if (n_goals < 0 || pool_size < 1) {
    throw ConfigError("snapshot: n_goals >= 0 and pool_size >= 1 required");
  }
  GoalSnapshot snap;
  snap.env_steps = env_steps;
  if (!buffer.empty()) snap.candidate_pool = buffer.sample_states(pool_size, rng);
  const DdfModel* effective =
      buffer.size() < config.min_buffer_steps ? nullptr : ddf;
  snap.goals = draw_goals_from_pool(snap.candidate_pool, effective, env, config,
                                    s0, n_goals, rng);
  snap.report = difficulty_report_for_env(snap.goals, env, s0);
  if (ddf) {
    std::ostringstream blob;
    save_ddf(blob, *ddf);
    snap.ddf_blob = blob.str();
  }
  return snap;
}

RunResult run_training(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const auto env = make_env(config);
  const auto eval_env = make_env(config);
  const EnvSpec& spec = env->spec();
  const bool discrete =
      std::holds_alternative<DiscreteActionSpace>(spec.action_space);
  const bool curriculum = config.method == Method::curriculum;

  Rng env_rng(seed, kStreamEnv);
  Rng init_rng(seed, kStreamAgentInit);
  Rng act_rng(seed, kStreamAct);
  Rng her_rng(seed, kStreamHer);
  Rng ddf_rng(seed, kStreamDdf);
  Rng goal_rng(seed, kStreamGoal);
  Rng eval_rng(seed, kStreamEval);

  ReplayBuffer buffer(config.replay.capacity);
  const HerConfig her{config.replay.her_k};
  const BinSpec bin_spec = make_bin_spec(env_horizon(config), config.ddf.bins);

  std::optional<QAgent> q_agent;
  std::optional<AcAgent> ac_agent;
  if (discrete) {
    QAgentConfig qc;
    qc.hidden = config.agent.hidden;
    qc.gamma = config.agent.gamma;
    qc.learning_rate = config.agent.learning_rate;
    qc.tau = config.agent.tau;
    qc.eps_start = config.agent.eps_start;
    qc.eps_end = config.agent.eps_end;
    qc.eps_anneal_steps = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(config.agent.eps_anneal_frac *
                                     static_cast<double>(config.total_env_steps)));
    q_agent.emplace(spec, qc, init_rng);
  } else {
    AcAgentConfig acc;
    acc.hidden = config.agent.hidden;
    acc.gamma = config.agent.gamma;
    acc.learning_rate = config.agent.learning_rate;
    acc.tau = config.agent.tau;
    acc.noise_scale = config.agent.noise_scale;
    ac_agent.emplace(spec, acc, init_rng);
  }
  auto act = [&](const Vec& state, const Vec& goal, bool explore) {
    return discrete ? q_agent->act(state, goal, explore, act_rng)
                    : ac_agent->act(state, goal, explore, act_rng);
  };

  RunResult result;
  result.method = config.method;
  result.seed = seed;

  std::optional<DdfModel> ddf;
  double ddf_holdout_accuracy = -1.0;
  std::int64_t last_ddf_train = 0;

  std::int64_t env_steps = 0;
  std::int64_t next_eval = config.eval_every;
  std::int64_t next_snapshot =
      config.snapshot_every > 0 ? config.snapshot_every : 0;
  int snapshot_index = 0;

  // Per-eval-window accumulators over completed training episodes.
  double window_return = 0.0;
  double window_distance = 0.0;
  std::int64_t window_episodes = 0;
  std::array<std::int64_t, 4> window_sources = {0, 0, 0, 0};

  auto emit_metrics_row = [&](std::int64_t at_steps) {
    std::vector<Vec> goals;
    goals.reserve(config.eval_goal_count);
    for (int i = 0; i < config.eval_goal_count; ++i) {
      goals.push_back(eval_env->sample_uniform_goal(eval_rng));
    }
    MetricsRow row;
    row.env_steps = at_steps;
    row.success_rate = discrete ? evaluate(*q_agent, *eval_env, goals)
                                : evaluate(*ac_agent, *eval_env, goals);
    if (window_episodes > 0) {
      row.mean_episode_return = window_return / window_episodes;
      row.mean_goal_oracle_distance = window_distance / window_episodes;
    }
    row.ddf_holdout_accuracy = ddf_holdout_accuracy;
    row.goal_source_counts = window_sources;
    result.metrics.rows.push_back(row);
    window_return = 0.0;
    window_distance = 0.0;
    window_episodes = 0;
    window_sources = {0, 0, 0, 0};
  };

  auto take_snapshot = [&](std::int64_t at_steps) {
    Rng snap_rng(seed, kStreamSnapshotBase + snapshot_index);
    ++snapshot_index;
    result.snapshots.push_back(snapshot_goal_distribution(
        buffer, ddf ? &*ddf : nullptr, *eval_env, config.goalgen,
        env->start_state(), config.snapshot_goal_count,
        config.snapshot_pool_size, at_steps, snap_rng));
  };

  auto retrain_ddf = [&] {
    const std::vector<Episode> episodes =
        buffer.recent_slice(config.ddf.recent_steps);
    const int per_episode = std::max<int>(
        1, config.ddf.pairs_per_retrain / static_cast<int>(episodes.size()));
    PairDataset dataset =
        build_pair_dataset(episodes, per_episode, bin_spec, ddf_rng);
    ddf_rng.shuffle(dataset);
    const std::size_t holdout =
        static_cast<std::size_t>(config.ddf.holdout_fraction *
                                 static_cast<double>(dataset.size()));
    const PairDataset holdout_set(dataset.end() - holdout, dataset.end());
    dataset.resize(dataset.size() - holdout);
    DdfModel fresh =
        DdfModel::create(spec.state_dim, bin_spec, config.ddf.hidden, ddf_rng);
    train_ddf(fresh, dataset, config.ddf.epochs, config.ddf.batch_size, ddf_rng,
              config.ddf.learning_rate);
    ddf_holdout_accuracy = exact_bin_accuracy(
        fresh, holdout_set.empty() ? dataset : holdout_set);
    ddf = std::move(fresh);
    result.ddf_train_count += 1;
    last_ddf_train = env_steps;
  };

  auto pick_goal = [&]() -> GoalSample {
    if (!curriculum) {
      return {env->sample_uniform_goal(goal_rng), GoalSource::uniform_mix,
              std::nullopt, 0};
    }
    if (!ddf) {
      // Never query the distance model before its first training.
      return {env->sample_uniform_goal(goal_rng), GoalSource::warmup,
              std::nullopt, 0};
    }
    return generate_goal(env->start_state(), buffer, *ddf, *env, config.goalgen,
                         goal_rng);
  };

  while (env_steps < config.total_env_steps) {
    const GoalSample goal_sample = pick_goal();
    const Vec& goal = goal_sample.goal;

    EpisodeRecord record;
    record.episode_index = result.episode_count;
    record.env_steps_before = env_steps;
    record.goal = goal;
    record.source = goal_sample.source;
    record.predicted_bin = goal_sample.predicted_bin;
    record.oracle_distance = env->oracle_goal_distance(goal);

    Vec state = env->reset(env_rng, goal);
    Episode episode;
    while (env->episode_active() && env_steps < config.total_env_steps) {
      if (discrete) q_agent->set_env_step(env_steps);
      const Action action = act(state, goal, true);
      const auto [next_state, reward, done] = env->step(action);
      episode.transitions.push_back({state, action, next_state,
                                     env->achieved_goal(next_state), goal,
                                     reward, done});
      state = next_state;
      record.episode_return += reward;
      if (done && reward == 0.0) record.success = true;
      ++env_steps;

      if (buffer.size() >= config.agent.learn_start) {
        for (int u = 0; u < config.agent.updates_per_step; ++u) {
          const auto batch = buffer.sample_her_batch(config.agent.batch_size,
                                                     her, spec.epsilon, her_rng);
          if (discrete) {
            q_agent->update(batch);
          } else {
            ac_agent->update(batch);
          }
        }
      }
      while (next_eval <= config.total_env_steps && env_steps >= next_eval) {
        emit_metrics_row(next_eval);
        next_eval += config.eval_every;
      }
      while (next_snapshot > 0 && next_snapshot <= config.total_env_steps &&
             env_steps >= next_snapshot) {
        if (curriculum) take_snapshot(next_snapshot);
        next_snapshot += config.snapshot_every;
      }
    }
    record.length = episode.length();
    buffer.push_episode(std::move(episode));
    result.episode_count += 1;
    window_return += record.episode_return;
    window_distance += record.oracle_distance;
    window_sources[static_cast<int>(record.source)] += 1;
    window_episodes += 1;
    result.episodes.push_back(std::move(record));

    if (curriculum && !buffer.empty() &&
        retrain_schedule_due(env_steps, config.ddf.retrain_interval,
                             last_ddf_train)) {
      retrain_ddf();
    }
  }
  result.env_steps = env_steps;
  return result;
}

std::optional<std::int64_t> steps_to_threshold(const RunMetrics& metrics,
                                               double threshold) {
  for (const MetricsRow& row : metrics.rows) {
    if (row.success_rate >= threshold) return row.env_steps;
  }
  return std::nullopt;
}

std::optional<std::int64_t> steps_to_sustained_threshold(
    const RunMetrics& metrics, double threshold) {
  std::optional<std::int64_t> candidate;
  for (const MetricsRow& row : metrics.rows) {
    if (row.success_rate >= threshold) {
      if (!candidate) candidate = row.env_steps;
    } else {
      candidate.reset();
    }
  }
  return candidate;
}

std::vector<AggregateRow> aggregate_success(const std::vector<RunResult>& runs) {
  std::vector<AggregateRow> rows;
  for (const Method method : {Method::curriculum, Method::uniform_baseline}) {
    std::vector<const RunResult*> group;
    for (const RunResult& run : runs) {
      if (run.method == method) group.push_back(&run);
    }
    if (group.empty()) continue;
    const std::size_t points = group.front()->metrics.rows.size();
    for (const RunResult* run : group) {
      if (run->metrics.rows.size() != points) {
        throw ConfigError("aggregate: runs have differing eval points");
      }
    }
    for (std::size_t p = 0; p < points; ++p) {
      std::vector<double> values;
      values.reserve(group.size());
      for (const RunResult* run : group) {
        values.push_back(run->metrics.rows[p].success_rate);
      }
      std::sort(values.begin(), values.end());
      const std::size_t n = values.size();
      const double median = n % 2 == 1
                                ? values[n / 2]
                                : 0.5 * (values[n / 2 - 1] + values[n / 2]);
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);  // population deviation: 0 for one seed
      AggregateRow row;
      row.method = method;
      row.env_steps = group.front()->metrics.rows[p].env_steps;
      row.success_median = median;
      row.success_mean = mean;
      row.success_std = std::sqrt(var);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::optional<std::int64_t> median_steps(
    std::vector<std::optional<std::int64_t>> values) {
  // Runs that never reach the threshold sort above every finite value;
  // the median is unreached when half or more never got there.
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) {
              if (a && b) return *a < *b;
              return a.has_value() && !b.has_value();
            });
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  const auto& lo = values[n / 2 - 1];
  const auto& hi = values[n / 2];
  if (!lo || !hi) return std::nullopt;
  return (*lo + *hi) / 2;
}

}  // namespace

std::vector<ThresholdRow> threshold_summary(const std::vector<RunResult>& runs) {
  static constexpr double kThresholds[] = {0.5, 0.8, 0.9};
  std::vector<ThresholdRow> rows;
  for (const Method method : {Method::curriculum, Method::uniform_baseline}) {
    for (const double threshold : kThresholds) {
      std::vector<std::optional<std::int64_t>> firsts, sustained;
      for (const RunResult& run : runs) {
        if (run.method != method) continue;
        ThresholdRow row;
        row.method = method;
        row.seed = run.seed;
        row.threshold = threshold;
        row.steps_to_first = steps_to_threshold(run.metrics, threshold);
        row.steps_to_sustained =
            steps_to_sustained_threshold(run.metrics, threshold);
        firsts.push_back(row.steps_to_first);
        sustained.push_back(row.steps_to_sustained);
        rows.push_back(row);
      }
      if (!firsts.empty()) {
        ThresholdRow median;
        median.method = method;
        median.is_median = true;
        median.threshold = threshold;
        median.steps_to_first = median_steps(firsts);
        median.steps_to_sustained = median_steps(std::move(sustained));
        rows.push_back(median);
      }
    }
  }
  return rows;
}

SuiteResult run_suite(const ExperimentConfig& config) {
  config.validate();
  SuiteResult suite;
  for (const Method method : {Method::curriculum, Method::uniform_baseline}) {
    ExperimentConfig run_config = config;
    run_config.method = method;
    for (const std::uint64_t seed : config.seeds) {
      suite.runs.push_back(run_training(run_config, seed));
    }
  }
  suite.aggregate = aggregate_success(suite.runs);
  suite.thresholds = threshold_summary(suite.runs);
  return suite;
}

std::string run_csv_name(Method method, std::uint64_t seed) {
  return std::string("run_") + to_string(method) + "_" +
         format_int(static_cast<std::int64_t>(seed)) + ".csv";
}

std::string episodes_csv_name(Method method, std::uint64_t seed) {
  return std::string("episodes_") + to_string(method) + "_" +
         format_int(static_cast<std::int64_t>(seed)) + ".csv";
}

std::string metrics_to_csv(const RunMetrics& metrics) {
  std::string out =
      "env_steps,success_rate,mean_episode_return,mean_goal_oracle_distance,"
      "ddf_holdout_accuracy,goals_curriculum,goals_uniform_fallback,"
      "goals_uniform_mix,goals_warmup\n";
  for (const MetricsRow& row : metrics.rows) {
    out += format_int(row.env_steps);
    out += ',';
    out += format_double(row.success_rate);
    out += ',';
    out += format_double(row.mean_episode_return);
    out += ',';
    out += format_double(row.mean_goal_oracle_distance);
    out += ',';
    out += format_double(row.ddf_holdout_accuracy);
    for (const std::int64_t count : row.goal_source_counts) {
      out += ',';
      out += format_int(count);
    }
    out += '\n';
  }
  return out;
}

std::string episodes_to_csv(const std::vector<EpisodeRecord>& episodes) {
  std::string out =
      "episode,env_steps_before,source,predicted_bin,oracle_distance,length,"
      "episode_return,success,goal_0,goal_1\n";
  for (const EpisodeRecord& e : episodes) {
    out += format_int(e.episode_index);
    out += ',';
    out += format_int(e.env_steps_before);
    out += ',';
    out += csv_escape(to_string(e.source));
    out += ',';
    if (e.predicted_bin) out += format_int(*e.predicted_bin);
    out += ',';
    out += format_double(e.oracle_distance);
    out += ',';
    out += format_int(e.length);
    out += ',';
    out += format_double(e.episode_return);
    out += ',';
    out += e.success ? '1' : '0';
    for (Eigen::Index d = 0; d < e.goal.size(); ++d) {
      out += ',';
      out += format_double(e.goal[d]);
    }
    out += '\n';
  }
  return out;
}

std::string snapshot_goals_to_csv(const GoalSnapshot& snapshot) {
  std::string out =
      "env_steps,source,predicted_bin,candidate_count_in_bin,goal_0,goal_1\n";
  for (const GoalSample& g : snapshot.goals) {
    out += format_int(snapshot.env_steps);
    out += ',';
    out += csv_escape(to_string(g.source));
    out += ',';
    if (g.predicted_bin) out += format_int(*g.predicted_bin);
    out += ',';
    out += format_int(g.candidate_count_in_bin);
    for (Eigen::Index d = 0; d < g.goal.size(); ++d) {
      out += ',';
      out += format_double(g.goal[d]);
    }
    out += '\n';
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "method,env_steps,success_median,success_mean,success_std\n";
  for (const AggregateRow& row : rows) {
    out += csv_escape(to_string(row.method));
    out += ',';
    out += format_int(row.env_steps);
    out += ',';
    out += format_double(row.success_median);
    out += ',';
    out += format_double(row.success_mean);
    out += ',';
    out += format_double(row.success_std);
    out += '\n';
  }
  return out;
}

std::string thresholds_to_csv(const std::vector<ThresholdRow>& rows) {
  std::string out =
      "method,seed,threshold,steps_to_first,steps_to_sustained\n";
  for (const ThresholdRow& row : rows) {
    out += csv_escape(to_string(row.method));
    out += ',';
    out += row.is_median ? "median" : format_int(static_cast<std::int64_t>(row.seed));
    out += ',';
    out += format_double(row.threshold);
    out += ',';
    if (row.steps_to_first) out += format_int(*row.steps_to_first);
    out += ',';
    if (row.steps_to_sustained) out += format_int(*row.steps_to_sustained);
    out += '\n';
  }
  return out;
}

namespace {

std::string pool_to_csv(const GoalSnapshot& snapshot) {
  std::string out;
  if (snapshot.candidate_pool.empty()) return "state_0,state_1,agoal_0,agoal_1\n";
  const Eigen::Index state_dim = snapshot.candidate_pool.front().first.size();
  const Eigen::Index goal_dim = snapshot.candidate_pool.front().second.size();
  for (Eigen::Index d = 0; d < state_dim; ++d) {
    if (d) out += ',';
    out += "state_" + format_int(d);
  }
  for (Eigen::Index d = 0; d < goal_dim; ++d) {
    out += ",agoal_" + format_int(d);
  }
  out += '\n';
  for (const auto& [state, agoal] : snapshot.candidate_pool) {
    for (Eigen::Index d = 0; d < state.size(); ++d) {
      if (d) out += ',';
      out += format_double(state[d]);
    }
    for (Eigen::Index d = 0; d < agoal.size(); ++d) {
      out += ',';
      out += format_double(agoal[d]);
    }
    out += '\n';
  }
  return out;
}

void write_snapshots(const RunResult& run, const std::filesystem::path& dir) {
  if (run.snapshots.empty()) return;
  std::filesystem::create_directories(dir);
  for (const GoalSnapshot& snap : run.snapshots) {
    const std::string step = format_int(snap.env_steps);
    write_text_file(dir / ("goals_" + step + ".csv"),
                    snapshot_goals_to_csv(snap));
    write_text_file(dir / ("pool_" + step + ".csv"), pool_to_csv(snap));
    if (!snap.ddf_blob.empty()) {
      write_text_file(dir / ("ddf_" + step + ".ckpt"), snap.ddf_blob);
    }
  }
}

}  // namespace

void write_run_files(const ExperimentConfig& config, const RunResult& run,
                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / run_csv_name(run.method, run.seed),
                  metrics_to_csv(run.metrics));
  write_text_file(out_dir / episodes_csv_name(run.method, run.seed),
                  episodes_to_csv(run.episodes));
  (void)config;
  write_snapshots(run, out_dir);
}

void write_suite_files(const ExperimentConfig& config, const SuiteResult& suite,
                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const RunResult& run : suite.runs) {
    write_text_file(out_dir / run_csv_name(run.method, run.seed),
                    metrics_to_csv(run.metrics));
    write_text_file(out_dir / episodes_csv_name(run.method, run.seed),
                    episodes_to_csv(run.episodes));
    // Snapshots from different runs share step numbers; keep each
    // run's set in its own directory.
    write_snapshots(run, out_dir / (std::string("snapshots_") +
                                    to_string(run.method) + "_" +
                                    format_int(static_cast<std::int64_t>(run.seed))));
  }
  write_text_file(out_dir / "aggregate.csv", aggregate_to_csv(suite.aggregate));
  write_text_file(out_dir / "thresholds.csv",
                  thresholds_to_csv(suite.thresholds));
}

void write_manifest(const ExperimentConfig& config,
                    const std::filesystem::path& out_dir,
                    const std::string& command) {
  std::filesystem::create_directories(out_dir);
  std::string body = "[meta]\n";
  body += std::string("version = ") + kVersion + "\n";
  body += "command = " + command + "\n\n";
  body += serialize_config(config);
  write_text_file(out_dir / "manifest", body);
}

}  // namespace ddcur
