// Acceptance gate: one check per release criterion, each printing a
// single pass/fail line with its measured evidence and runtime. Exit
// status is nonzero when any selected criterion fails.
//
// Usage: ddcur_acceptance [--cli <path>] [--scratch <dir>] [--only 1,4,8]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddcur/agents.hpp"
#include "ddcur/harness.hpp"
#include "test_helpers.hpp"

using namespace ddcur;
namespace dt = ddcur::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string cli_path;
fs::path scratch_dir;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

// The desk-scale two-room reference experiment; field defaults mirror
// configs/gridnav.ini.
ExperimentConfig gridnav_config() {
  ExperimentConfig cfg;
  cfg.out_dir = "unused";
  return cfg;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ------------------------------------------------------------ criterion 1

Outcome check_gradients() {
  double worst = 0.0;
  Rng rng(101, 0);
  const auto sample_net = [&](const std::vector<int>& sizes, const Mat& inputs) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Mlp net = Mlp::random_init(sizes, rng);
      for (Vec& b : net.biases) {
        for (int i = 0; i < b.size(); ++i) b[i] = rng.uniform(-0.3, 0.3);
      }
      if (dt::min_hidden_preactivation(net, inputs) > 1e-3) return net;
    }
    return Mlp::random_init(sizes, rng);
  };

  for (int instance = 0; instance < 20; ++instance) {
    Mat inputs(3, 5);
    for (int c = 0; c < 5; ++c) {
      for (int r = 0; r < 3; ++r) inputs(r, c) = rng.uniform(-1, 1);
    }
    std::vector<int> labels(5);
    for (int& l : labels) l = static_cast<int>(rng.uniform_int(0, 3));
    const Mlp net = sample_net({3, 12, 8, 4}, inputs);
    const auto [loss, grads] = backward_cross_entropy(net, inputs, labels);
    const auto fd = dt::finite_difference_check(net, grads, [&](const Mlp& n) {
      return backward_cross_entropy(n, inputs, labels).first;
    });
    worst = std::max(worst, fd.max_rel_error);
  }
  for (int instance = 0; instance < 20; ++instance) {
    Mat inputs(4, 6);
    Mat targets(2, 6);
    for (int c = 0; c < 6; ++c) {
      for (int r = 0; r < 4; ++r) inputs(r, c) = rng.uniform(-1, 1);
      for (int r = 0; r < 2; ++r) targets(r, c) = rng.uniform(-1, 1);
    }
    const Mlp net = sample_net({4, 10, 10, 2}, inputs);
    const auto [loss, grads] = backward_mse(net, inputs, targets);
    const auto fd = dt::finite_difference_check(net, grads, [&](const Mlp& n) {
      return backward_mse(n, inputs, targets).first;
    });
    worst = std::max(worst, fd.max_rel_error);
  }
  return {worst < 1e-4,
          "max relative error " + fmt(worst) + " over 20+20 instances (limit 1e-4)"};
}

// ------------------------------------------------------------ criterion 2

Outcome check_bins() {
  const BinSpec spec = make_bin_spec(50, 5);
  const std::vector<int> want = {2, 5, 10, 23, 50};
  if (spec.upper_bounds != want) {
    std::string got;
    for (const int b : spec.upper_bounds) got += std::to_string(b) + " ";
    return {false, "upper bounds [" + got + "] != [2 5 10 23 50]"};
  }
  int prev = 0;
  std::set<int> seen;
  for (int s = 0; s <= 50; ++s) {
    const int b = bin_of(s, spec);
    if (b < 1 || b > 5) return {false, "bin_of(" + std::to_string(s) + ") out of range"};
    if (s > 0 && (b < prev || b - prev > 1)) {
      return {false, "bins skip or overlap at steps=" + std::to_string(s)};
    }
    prev = b;
    seen.insert(b);
  }
  if (seen.size() != 5) return {false, "not every bin is hit on [0,50]"};
  if (bin_of(4, spec) != 2) {
    return {false, "bin_of(4) = " + std::to_string(bin_of(4, spec)) + ", want 2"};
  }
  return {true, "bounds [2 5 10 23 50], exhaustive partition of [0,50], bin_of(4)=2"};
}

// ------------------------------------------------------------ criterion 3

Episode line_episode(int length, double tag, const Vec& goal) {
  Episode ep;
  for (int i = 0; i < length; ++i) {
    Transition t;
    t.state = vec2(0.01 * i, tag);
    t.action = 0;
    t.next_state = vec2(0.01 * (i + 1), tag);
    t.achieved_goal = t.next_state;
    t.desired_goal = goal;
    t.reward = -1.0;
    t.done = (i + 1 == length);
    ep.transitions.push_back(std::move(t));
  }
  return ep;
}

Outcome check_her() {
  const Vec impossible = vec2(50.0, 50.0);
  const double epsilon = 0.005;

  // exhaustive small case: length-2 episode; allowed relabel goals per
  // transition index are exactly the achieved goals at the same or a
  // later index
  {
    ReplayBuffer buf(100);
    buf.push_episode(line_episode(2, 0.5, impossible));
    Rng rng(31, 0);
    std::set<double> goals_seen_at[2];
    const auto samples = buf.sample_her_batch(40000, HerConfig{4}, epsilon, rng);
    for (const Transition& t : samples) {
      if (t.desired_goal == impossible) continue;
      const int idx = static_cast<int>(std::llround(t.state[0] / 0.01));
      goals_seen_at[idx].insert(t.desired_goal[0]);
      if (t.reward != sparse_reward(t.achieved_goal, t.desired_goal, epsilon)) {
        return {false, "relabeled reward not recomputed against the new goal"};
      }
    }
    const std::set<double> want0 = {0.01, 0.02};
    const std::set<double> want1 = {0.02};
    if (goals_seen_at[0] != want0 || goals_seen_at[1] != want1) {
      return {false, "relabel goal support wrong on the exhaustive 2-step case"};
    }
  }

  // never-precede and relabel rate over 1e5 samples
  ReplayBuffer buf(100000);
  for (int i = 0; i < 40; ++i) buf.push_episode(line_episode(25, 0.5, impossible));
  Rng rng(31, 1);
  std::int64_t relabeled = 0;
  const std::int64_t total = 100000;
  for (std::int64_t drawn = 0; drawn < total; drawn += 1000) {
    const auto samples = buf.sample_her_batch(1000, HerConfig{4}, epsilon, rng);
    for (const Transition& t : samples) {
      if (t.desired_goal == impossible) continue;
      ++relabeled;
      if (t.desired_goal[0] < t.next_state[0] - 1e-12) {
        return {false, "relabel goal precedes its transition"};
      }
      if (t.reward != sparse_reward(t.achieved_goal, t.desired_goal, epsilon)) {
        return {false, "relabeled reward not recomputed"};
      }
    }
  }
  const double rate = relabeled / static_cast<double>(total);
  const bool ok = rate >= 0.79 && rate <= 0.81;
  return {ok, "relabel rate " + fmt(rate) + " over 1e5 samples (want 0.80 +- 0.01); "
              "recompute and never-precede hold"};
}

// ------------------------------------------------------------ criterion 4

Outcome check_ddf_vs_oracle() {
  auto env = GridNavEnv::two_room(20, 20, 50);
  Rng env_rng(41, 0);

  // random-policy trajectories
  std::vector<Episode> episodes;
  std::int64_t steps = 0;
  while (steps < 25000) {
    const Vec goal = env.sample_uniform_goal(env_rng);
    Vec s = env.reset(env_rng, goal);
    Episode ep;
    while (env.episode_active()) {
      const int a = static_cast<int>(env_rng.uniform_int(0, 3));
      auto [s2, r, done] = env.step(a);
      Transition t;
      t.state = s;
      t.action = a;
      t.next_state = s2;
      t.achieved_goal = env.achieved_goal(s2);
      t.desired_goal = goal;
      t.reward = r;
      t.done = done;
      ep.transitions.push_back(t);
      s = s2;
    }
    steps += ep.length();
    episodes.push_back(std::move(ep));
  }

  const BinSpec spec = make_bin_spec(50, 5);
  const int per_episode = static_cast<int>(
      (10000 + episodes.size() - 1) / episodes.size());
  Rng data_rng(41, 1);
  const PairDataset train = build_pair_dataset(episodes, per_episode, spec, data_rng);
  const PairDataset holdout =
      build_pair_dataset(episodes, 2, spec, data_rng);  // ~1k fresh pairs

  Rng model_rng(41, 2);
  DdfModel model = DdfModel::create(2, spec, {128, 128}, model_rng);
  Rng train_rng(41, 3);
  train_ddf(model, train, 60, 64, train_rng, 1e-3);

  const double exact = exact_bin_accuracy(model, holdout);
  std::int64_t within = 0;
  for (const auto& [pair, label] : holdout) {
    const auto [bin, logits] = predict_bin(model, pair.from, pair.to);
    if (std::abs(bin - label) <= 1) ++within;
  }
  const double within_one = within / static_cast<double>(holdout.size());

  // rank correlation on 1e3 random same-episode pairs vs the exact
  // shortest-path oracle
  Rng pair_rng(41, 4);
  std::vector<double> predicted, oracle;
  for (int n = 0; n < 1000; ++n) {
    const Episode& ep = episodes[pair_rng.index(episodes.size())];
    const int len = ep.length();
    const int i = static_cast<int>(pair_rng.uniform_int(0, len - 1));
    const int j = static_cast<int>(pair_rng.uniform_int(i, len));
    const Vec from = ep.transitions[i].state;
    const Vec to = j < len ? ep.transitions[j].state
                           : ep.transitions[len - 1].next_state;
    const auto [bin, logits] = predict_bin(model, from, to);
    const auto d = env.oracle_distance(env.decode_point(from), env.decode_point(to));
    predicted.push_back(bin);
    oracle.push_back(static_cast<double>(*d));
  }
  const double rho = dt::spearman(predicted, oracle);

  const bool ok = exact >= 0.70 && within_one >= 0.95 && rho >= 0.8;
  return {ok, "holdout exact " + fmt(exact) + " (>=0.70), within-one " +
              fmt(within_one) + " (>=0.95), spearman vs oracle " + fmt(rho) +
              " (>=0.8) on " + std::to_string(train.size()) + " training pairs"};
}

// ------------------------------------------------------------ criterion 5

Outcome check_curriculum_monotonicity() {
  ExperimentConfig cfg = gridnav_config();
  cfg.total_env_steps = 36000;
  cfg.snapshot_every = 3000;  // 12 evenly spaced snapshots
  cfg.snapshot_goal_count = 100;
  cfg.goalgen.uniform_mix_prob = 0.1;
  cfg.ddf.retrain_interval = 2000;
  const RunResult run = run_training(cfg, 1);

  // first snapshot whose goals come from the generator rather than the
  // warm-up fallback; the series before it reflects uniform sampling
  std::optional<std::size_t> first_active;
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const auto& hist = run.snapshots[i].report.source_histogram;
    const auto it = hist.find(GoalSource::curriculum);
    if (it != hist.end() && it->second > 0) {
      first_active = i;
      break;
    }
  }
  if (!first_active) return {false, "no post-warm-up snapshot found"};

  std::vector<double> index, mean_distance;
  for (std::size_t i = *first_active; i < run.snapshots.size(); ++i) {
    index.push_back(static_cast<double>(i));
    mean_distance.push_back(run.snapshots[i].report.mean_distance);
  }
  if (index.size() < 10) {
    return {false, "only " + std::to_string(index.size()) +
                   " post-warm-up snapshots"};
  }
  const double rho = dt::spearman(index, mean_distance);
  const double first_mean = mean_distance.front();
  const double final_mean = mean_distance.back();
  const double ratio = first_mean > 0 ? final_mean / first_mean : 0.0;

  const bool ok = rho >= 0.6 && ratio >= 2.0;
  return {ok, "spearman(index, mean oracle distance) " + fmt(rho) +
              " (>=0.6) over " + std::to_string(index.size()) +
              " post-warm-up snapshots; final/first " + fmt(final_mean, 3) + "/" +
              fmt(first_mean, 3) + " = " + fmt(ratio, 3) + "x (>=2x)"};
}

// --------------------------------------------------- criteria 6 and 7

struct SharedRuns {
  std::vector<RunResult> curriculum;   // default config
  std::vector<RunResult> baseline;     // method = uniform
  std::vector<RunResult> mix1;         // curriculum with mix prob 1
};

SharedRuns& shared_runs() {
  static SharedRuns runs;
  return runs;
}

void ensure_runs(bool need_curriculum, bool need_baseline, bool need_mix1) {
  SharedRuns& rs = shared_runs();
  const ExperimentConfig base = gridnav_config();
  const auto run_all = [&](const ExperimentConfig& cfg) {
    std::vector<RunResult> out;
    for (const std::uint64_t seed : base.seeds) {
      out.push_back(run_training(cfg, seed));
      std::fprintf(stderr, "  [runs] %s seed %llu done (%lld episodes)\n",
                   to_string(cfg.method), static_cast<unsigned long long>(seed),
                   static_cast<long long>(out.back().episode_count));
    }
    return out;
  };
  if (need_curriculum && rs.curriculum.empty()) {
    ExperimentConfig cfg = base;
    cfg.method = Method::curriculum;
    rs.curriculum = run_all(cfg);
  }
  if (need_baseline && rs.baseline.empty()) {
    ExperimentConfig cfg = base;
    cfg.method = Method::uniform_baseline;
    rs.baseline = run_all(cfg);
  }
  if (need_mix1 && rs.mix1.empty()) {
    ExperimentConfig cfg = base;
    cfg.method = Method::curriculum;
    cfg.goalgen.uniform_mix_prob = 1.0;
    rs.mix1 = run_all(cfg);
  }
}

std::optional<double> median_sustained(const std::vector<RunResult>& runs,
                                       double threshold) {
  std::vector<double> values;
  for (const RunResult& run : runs) {
    const auto steps = steps_to_sustained_threshold(run.metrics, threshold);
    if (!steps) return std::nullopt;  // a censored seed blocks the median
    values.push_back(static_cast<double>(*steps));
  }
  return median_of(values);
}

double median_final_success(const std::vector<RunResult>& runs) {
  std::vector<double> finals;
  for (const RunResult& run : runs) {
    finals.push_back(run.metrics.rows.back().success_rate);
  }
  return median_of(finals);
}

Outcome check_sample_efficiency() {
  ensure_runs(true, true, false);
  const SharedRuns& rs = shared_runs();

  const auto cur = median_sustained(rs.curriculum, 0.8);
  const auto base = median_sustained(rs.baseline, 0.8);
  if (!cur) return {false, "a curriculum seed never sustains 0.8 success"};
  if (!base) return {false, "a baseline seed never sustains 0.8 success"};
  const double reduction = 1.0 - *cur / *base;

  const double cur_final = median_final_success(rs.curriculum);
  const double base_final = median_final_success(rs.baseline);

  const bool ok = reduction >= 0.20 && cur_final >= 0.85 && base_final >= 0.85;
  return {ok, "median steps to sustained 0.8: curriculum " + fmt(*cur, 6) +
              " vs uniform " + fmt(*base, 6) + " (" + fmt(100 * reduction, 3) +
              "% lower, need >=20%); final success medians " + fmt(cur_final, 3) +
              "/" + fmt(base_final, 3) + " (both >=0.9 within 0.05)"};
}

Outcome check_baseline_recovery() {
  ensure_runs(false, true, true);
  const SharedRuns& rs = shared_runs();

  // goal-cell distribution over all training episodes, pooled per arm
  auto env = GridNavEnv::two_room(20, 20, 50);
  const auto cell_counts = [&](const std::vector<RunResult>& runs) {
    std::map<int, std::int64_t> counts;
    for (const RunResult& run : runs) {
      for (const EpisodeRecord& ep : run.episodes) {
        const Cell c = env.decode_point(ep.goal);
        ++counts[c.y * 20 + c.x];
      }
    }
    return counts;
  };
  const auto a = cell_counts(rs.mix1);
  const auto b = cell_counts(rs.baseline);

  double n1 = 0, n2 = 0;
  std::set<int> cells;
  for (const auto& [cell, c] : a) {
    n1 += c;
    cells.insert(cell);
  }
  for (const auto& [cell, c] : b) {
    n2 += c;
    cells.insert(cell);
  }
  double stat = 0.0;
  int dof = -1;
  for (const int cell : cells) {
    const double c1 = a.count(cell) ? static_cast<double>(a.at(cell)) : 0.0;
    const double c2 = b.count(cell) ? static_cast<double>(b.at(cell)) : 0.0;
    const double total = c1 + c2;
    const double e1 = total * n1 / (n1 + n2);
    const double e2 = total * n2 / (n1 + n2);
    stat += (c1 - e1) * (c1 - e1) / e1 + (c2 - e2) * (c2 - e2) / e2;
    ++dof;
  }
  const double p = dt::chi_square_p_value(stat, dof);

  // learning curves overlap within one pooled standard deviation at
  // every eval point; a small floor absorbs the 50-goal eval noise
  // when all seeds agree exactly
  const auto curve = [](const std::vector<RunResult>& runs, std::size_t t) {
    std::vector<double> v;
    for (const RunResult& run : runs) v.push_back(run.metrics.rows[t].success_rate);
    return v;
  };
  const std::size_t points = rs.baseline.front().metrics.rows.size();
  double worst_gap = 0.0;
  bool overlap = true;
  for (std::size_t t = 0; t < points; ++t) {
    const std::vector<double> c = curve(rs.mix1, t);
    const std::vector<double> u = curve(rs.baseline, t);
    const auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (const double x : v) s += x;
      return s / v.size();
    };
    const auto var = [&](const std::vector<double>& v) {
      const double m = mean(v);
      double s = 0;
      for (const double x : v) s += (x - m) * (x - m);
      return s / (v.size() - 1);
    };
    const double pooled = std::sqrt(0.5 * (var(c) + var(u)));
    const double gap = std::abs(mean(c) - mean(u));
    worst_gap = std::max(worst_gap, gap - std::max(pooled, 0.02));
    if (gap > std::max(pooled, 0.02)) overlap = false;
  }

  const bool ok = p > 0.01 && overlap;
  return {ok, "goal-cell chi-square p " + fmt(p, 3) + " (need >0.01, dof " +
              std::to_string(dof) + "); curves " +
              (overlap ? "overlap" : "diverge (worst excess " + fmt(worst_gap, 3) + ")") +
              " within 1 pooled sd across " + std::to_string(points) + " eval points"};
}

// ------------------------------------------------------------ criterion 8

Outcome check_determinism() {
  if (cli_path.empty()) return {false, "no --cli path provided"};
  const fs::path dir = scratch_dir / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path cfg_path = dir / "repro.ini";
  {
    std::ofstream out(cfg_path);
    out << "[experiment]\n"
           "env = gridnav\n"
           "total_env_steps = 12000\n"
           "eval_every = 2000\n"
           "eval_goal_count = 20\n"
           "seeds = 1\n"
           "snapshot_every = 4000\n"
           "snapshot_goal_count = 30\n"
           "snapshot_pool_size = 256\n"
           "out_dir = unused\n"
           "[gridnav]\n"
           "width = 10\nheight = 10\nhorizon = 30\n"
           "[ddf]\n"
           "bins = 4\nhidden = 64,64\npairs_per_retrain = 3000\n"
           "retrain_interval = 3000\nrecent_steps = 8000\n"
           "[goalgen]\n"
           "candidate_batch_size = 128\nmin_buffer_steps = 1000\n"
           "[agent]\n"
           "hidden = 32,32\nlearn_start = 500\n";
  }

  const auto run_once = [&](const fs::path& out_dir) {
    const std::string cmd = "\"" + cli_path + "\" train --config \"" +
                            cfg_path.string() + "\" --seed 1 --out \"" +
                            out_dir.string() + "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (run_once(dir / "a") != 0) return {false, "first train run failed"};
  if (run_once(dir / "b") != 0) return {false, "second train run failed"};

  // every csv must exist in both trees with identical bytes
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    if (entry.path().extension() == ".csv") {
      names.push_back(entry.path().filename().string());
    }
  }
  if (names.empty()) return {false, "first run produced no csv files"};
  std::sort(names.begin(), names.end());
  const auto slurp = [](const fs::path& p) -> std::optional<std::string> {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  for (const std::string& name : names) {
    const auto left = slurp(dir / "a" / name);
    const auto right = slurp(dir / "b" / name);
    if (!right) return {false, name + " missing from the second run"};
    if (*left != *right) return {false, name + " differs between identical runs"};
  }
  return {true, std::to_string(names.size()) +
              " csv files byte-identical across repeated runs"};
}

}  // namespace

int main(int argc, char** argv) {
  scratch_dir = fs::temp_directory_path() / "ddcur_acceptance";
  std::set<int> selected = {1, 2, 3, 4, 5, 6, 7, 8};
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli_path = argv[++i];
    } else if (arg == "--scratch" && i + 1 < argc) {
      scratch_dir = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      selected.clear();
      std::istringstream list(argv[++i]);
      for (std::string tok; std::getline(list, tok, ',');) {
        selected.insert(std::stoi(tok));
      }
    } else {
      std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
      return 2;
    }
  }
  fs::create_directories(scratch_dir);

  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 10, check_gradients},
      {2, "bin discretization", 1, check_bins},
      {3, "hindsight relabeling", 30, check_her},
      {4, "distance model vs oracle", 180, check_ddf_vs_oracle},
      {5, "curriculum monotonicity", 1200, check_curriculum_monotonicity},
      {6, "sample efficiency", 3600, check_sample_efficiency},
      {7, "baseline recovery", 3600, check_baseline_recovery},
      {8, "determinism", 300, check_determinism},
  };

  int failures = 0;
  int ran = 0;
  for (const Criterion& criterion : criteria) {
    if (!selected.count(criterion.number)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (seconds > criterion.budget_seconds) {
      outcome.pass = false;
      outcome.detail += "; over the " + fmt(criterion.budget_seconds, 3) +
                        "s runtime budget";
    }
    if (!outcome.pass) ++failures;
    std::printf("criterion %d (%s): %s — %s [%.1fs]\n", criterion.number,
                criterion.name, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
