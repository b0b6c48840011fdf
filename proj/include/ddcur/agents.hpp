#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ddcur/envs.hpp"
#include "ddcur/nn.hpp"

namespace ddcur {

struct QAgentConfig {
  std::vector<int> hidden = {64, 64};
  double gamma = 0.98;
  double learning_rate = 1e-3;
  double tau = 0.005;  // soft target update rate
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::int64_t eps_anneal_steps = 60000;  // linear anneal horizon
};

/// Goal-conditioned Q-learning with a network critic over discrete
/// actions: critic(concat(state, goal)) -> per-action values.
class QAgent {
 public:
  QAgent(const EnvSpec& spec, const QAgentConfig& config, Rng& init_rng);

  /// Greedy action (ties toward the lower index), or uniform-random
  /// with the current exploration rate when explore is set.
  Action act(const Vec& state, const Vec& goal, bool explore, Rng& rng) const;

  /// One gradient step on the squared Bellman error
  ///   y = r + gamma * (1 - [r == 0]) * max_a' targetQ(s', g, a').
  /// Only success cuts the bootstrap; time limits do not. Returns the
  /// batch loss. Finishes with a soft target update.
  double update(const std::vector<Transition>& batch);

  /// Advances the linear exploration schedule (harness calls this once
  /// per environment step).
  void set_env_step(std::int64_t step) { env_step_ = step; }
  double exploration_rate() const;

  const Mlp& critic() const { return critic_; }
  const Mlp& target_critic() const { return target_; }
  void soft_update_target(double rate);

  double gamma() const { return config_.gamma; }
  int num_actions() const { return num_actions_; }

 private:
  QAgentConfig config_;
  int num_actions_;
  Mlp critic_;
  Mlp target_;
  AdamState opt_;
  std::int64_t env_step_ = 0;
};

struct AcAgentConfig {
  std::vector<int> hidden = {64, 64};
  double gamma = 0.98;
  double learning_rate = 1e-3;
  double tau = 0.005;
  /// Exploration noise stddev as a fraction of the per-dim action range.
  double noise_scale = 0.1;
};

struct AcLosses {
  double critic_loss = 0.0;
  double actor_value = 0.0;  // mean critic value of the actor's actions
};

/// Goal-conditioned deterministic actor-critic for continuous
/// actions: actor(concat(state, goal)) -> squashed bounded action,
/// critic(concat(state, goal, action)) -> scalar value.
class AcAgent {
 public:
  AcAgent(const EnvSpec& spec, const AcAgentConfig& config, Rng& init_rng);

  /// Deterministic actor output; with explore, adds Gaussian noise and
  /// clips back into the action bounds.
  Action act(const Vec& state, const Vec& goal, bool explore, Rng& rng) const;

  /// Critic regression toward the target-network Bellman value, then
  /// an actor step ascending the critic, then soft target updates.
  AcLosses update(const std::vector<Transition>& batch);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic() const { return target_critic_; }
  void soft_update_targets(double rate);

  double gamma() const { return config_.gamma; }

 private:
  Vec squash(const Vec& raw) const;          // tanh scaled into bounds
  Mat squash_batch(const Mat& raw) const;

  AcAgentConfig config_;
  int action_dim_;
  Vec action_low_, action_high_;
  Mlp actor_, critic_;
  Mlp target_actor_, target_critic_;
  AdamState actor_opt_, critic_opt_;
};

/// Policy evaluation: fraction of rollouts (no exploration) that end
/// in success within the horizon. A goal already satisfied at the
/// start state counts as an immediate success. Side-effect-free on
/// the agent.
using GreedyPolicy = std::function<Action(const Vec& state, const Vec& goal)>;

double evaluate(const GreedyPolicy& policy, GoalEnv& env,
                const std::vector<Vec>& goals);
double evaluate(const QAgent& agent, GoalEnv& env,
                const std::vector<Vec>& goals);
double evaluate(const AcAgent& agent, GoalEnv& env,
                const std::vector<Vec>& goals);

}  // namespace ddcur
