#include "ddcur/agents.hpp"

#include <algorithm>
#include <cmath>

namespace ddcur {

namespace {

Vec concat2(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

int greedy_action(const Vec& q) {
  int best = 0;
  for (int i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

std::vector<int> make_sizes(int input_dim, const std::vector<int>& hidden,
                            int output_dim) {
  std::vector<int> sizes;
  sizes.push_back(input_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_dim);
  return sizes;
}

}  // namespace

QAgent::QAgent(const EnvSpec& spec, const QAgentConfig& config, Rng& init_rng)
    : config_(config) {
  const auto* discrete = std::get_if<DiscreteActionSpace>(&spec.action_space);
  if (!discrete) throw ConfigError("QAgent: needs a discrete action space");
  if (config.gamma < 0.0 || config.gamma >= 1.0) {
    throw ConfigError("QAgent: gamma must lie in [0, 1)");
  }
  if (config.eps_anneal_steps < 1) {
    throw ConfigError("QAgent: eps_anneal_steps must be >= 1");
  }
  num_actions_ = discrete->count;
  critic_ = Mlp::random_init(
      make_sizes(spec.state_dim + spec.goal_dim, config.hidden, num_actions_),
      init_rng);
  target_ = critic_;
  opt_ = AdamState::for_net(critic_, config.learning_rate);
}

double QAgent::exploration_rate() const {
  const double frac = std::min(
      1.0, static_cast<double>(env_step_) / config_.eps_anneal_steps);
  return config_.eps_start + frac * (config_.eps_end - config_.eps_start);
}

Action QAgent::act(const Vec& state, const Vec& goal, bool explore,
                   Rng& rng) const {
  if (explore && rng.uniform() < exploration_rate()) {
    return static_cast<int>(rng.index(num_actions_));
  }
  return greedy_action(critic_.forward(concat2(state, goal)));
}

double QAgent::update(const std::vector<Transition>& batch) {
  if (batch.empty()) throw EmptyDatasetError("QAgent::update: empty batch");
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const int in_dim = critic_.input_dim();
  Mat inputs(in_dim, n), next_inputs(in_dim, n);
  Vec rewards(n);
  std::vector<int> actions(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = batch[i];
    inputs.col(i) = concat2(t.state, t.desired_goal);
    next_inputs.col(i) = concat2(t.next_state, t.desired_goal);
    rewards[i] = t.reward;
    const int* a = std::get_if<int>(&t.action);
    if (!a || *a < 0 || *a >= num_actions_) {
      throw InvalidActionError("QAgent::update: bad discrete action");
    }
    actions[i] = *a;
  }
  const Mat next_q = target_.forward_batch(next_inputs);
  const Mat q = critic_.forward_batch(inputs);
  Mat d_out = Mat::Zero(num_actions_, n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Only a success terminal cuts the bootstrap; horizon hits do not.
    const double boot = rewards[i] == 0.0 ? 0.0 : 1.0;
    const double y =
        rewards[i] + config_.gamma * boot * next_q.col(i).maxCoeff();
    const double diff = q(actions[i], i) - y;
    loss += diff * diff;
    d_out(actions[i], i) = 2.0 * diff / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  const Gradients grads = backward_from_output(critic_, inputs, d_out);
  adam_step(critic_, grads, opt_);
  soft_update_target(config_.tau);
  return loss;
}

void QAgent::soft_update_target(double rate) {
  soft_update(target_, critic_, rate);
}

AcAgent::AcAgent(const EnvSpec& spec, const AcAgentConfig& config, Rng& init_rng)
    : config_(config) {
  const auto* cont = std::get_if<ContinuousActionSpace>(&spec.action_space);
  if (!cont) throw ConfigError("AcAgent: needs a continuous action space");
  if (config.gamma < 0.0 || config.gamma >= 1.0) {
    throw ConfigError("AcAgent: gamma must lie in [0, 1)");
  }
  action_dim_ = cont->dim;
  action_low_ = cont->low;
  action_high_ = cont->high;
  const int obs_dim = spec.state_dim + spec.goal_dim;
  actor_ = Mlp::random_init(make_sizes(obs_dim, config.hidden, action_dim_),
                            init_rng);
  critic_ = Mlp::random_init(make_sizes(obs_dim + action_dim_, config.hidden, 1),
                             init_rng);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = AdamState::for_net(actor_, config.learning_rate);
  critic_opt_ = AdamState::for_net(critic_, config.learning_rate);
}

Vec AcAgent::squash(const Vec& raw) const {
  const Vec center = 0.5 * (action_low_ + action_high_);
  const Vec half = 0.5 * (action_high_ - action_low_);
  return center.array() + half.array() * raw.array().tanh();
}

Mat AcAgent::squash_batch(const Mat& raw) const {
  const Vec center = 0.5 * (action_low_ + action_high_);
  const Vec half = 0.5 * (action_high_ - action_low_);
  return ((raw.array().tanh().colwise() * half.array()).colwise() +
          center.array())
      .matrix();
}

Action AcAgent::act(const Vec& state, const Vec& goal, bool explore,
                    Rng& rng) const {
  Vec action = squash(actor_.forward(concat2(state, goal)));
  if (explore) {
    for (int i = 0; i < action_dim_; ++i) {
      const double sigma =
          config_.noise_scale * (action_high_[i] - action_low_[i]);
      action[i] = std::clamp(action[i] + rng.normal(0.0, sigma),
                             action_low_[i], action_high_[i]);
    }
  }
  return action;
}

AcLosses AcAgent::update(const std::vector<Transition>& batch) {
  if (batch.empty()) throw EmptyDatasetError("AcAgent::update: empty batch");
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const int obs_dim = actor_.input_dim();
  Mat obs(obs_dim, n), next_obs(obs_dim, n);
  Mat taken_actions(action_dim_, n);
  Vec rewards(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = batch[i];
    obs.col(i) = concat2(t.state, t.desired_goal);
    next_obs.col(i) = concat2(t.next_state, t.desired_goal);
    const Vec* a = std::get_if<Vec>(&t.action);
    if (!a || a->size() != action_dim_) {
      throw InvalidActionError("AcAgent::update: bad continuous action");
    }
    taken_actions.col(i) = *a;
    rewards[i] = t.reward;
  }

  // Critic regression toward the target-network Bellman value.
  const Mat next_actions = squash_batch(target_actor_.forward_batch(next_obs));
  Mat next_critic_in(obs_dim + action_dim_, n);
  next_critic_in << next_obs, next_actions;
  const Mat next_q = target_critic_.forward_batch(next_critic_in);
  Mat targets(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double boot = rewards[i] == 0.0 ? 0.0 : 1.0;
    targets(0, i) = rewards[i] + config_.gamma * boot * next_q(0, i);
  }
  Mat critic_in(obs_dim + action_dim_, n);
  critic_in << obs, taken_actions;
  const auto [critic_loss, critic_grads] =
      backward_mse(critic_, critic_in, targets);
  adam_step(critic_, critic_grads, critic_opt_);

  // Actor ascends the critic at its own actions.
  const Mat raw = actor_.forward_batch(obs);
  const Mat tanh_raw = raw.array().tanh().matrix();
  const Vec half = 0.5 * (action_high_ - action_low_);
  const Vec center = 0.5 * (action_low_ + action_high_);
  const Mat actor_actions =
      ((tanh_raw.array().colwise() * half.array()).colwise() + center.array())
          .matrix();
  Mat actor_critic_in(obs_dim + action_dim_, n);
  actor_critic_in << obs, actor_actions;
  const Mat actor_q = critic_.forward_batch(actor_critic_in);
  const double actor_value = actor_q.row(0).mean();
  // Minimize -mean(Q): propagate through the critic into its action
  // input, then through the tanh squash into the actor.
  const Mat d_q = Mat::Constant(1, n, -1.0 / static_cast<double>(n));
  Mat d_critic_in;
  backward_from_output(critic_, actor_critic_in, d_q, &d_critic_in);
  const Mat d_actions = d_critic_in.bottomRows(action_dim_);
  const Mat d_raw =
      (d_actions.array() * (1.0 - tanh_raw.array().square()).array())
          .colwise() *
      half.array();
  const Gradients actor_grads = backward_from_output(actor_, obs, d_raw.matrix());
  adam_step(actor_, actor_grads, actor_opt_);

  soft_update_targets(config_.tau);
  return {critic_loss, actor_value};
}

void AcAgent::soft_update_targets(double rate) {
  soft_update(target_actor_, actor_, rate);
  soft_update(target_critic_, critic_, rate);
}

double evaluate(const GreedyPolicy& policy, GoalEnv& env,
                const std::vector<Vec>& goals) {
  if (goals.empty()) throw ConfigError("evaluate: no goals");
  Rng reset_rng(0, 0);  // envs have fixed starts; reset draws nothing
  int successes = 0;
  for (const Vec& goal : goals) {
    Vec state = env.reset(reset_rng, goal);
    if (sparse_reward(env.achieved_goal(state), goal, env.spec().epsilon) ==
        0.0) {
      ++successes;
      continue;
    }
    while (env.episode_active()) {
      const auto [next_state, reward, done] = env.step(policy(state, goal));
      state = next_state;
      if (done && reward == 0.0) {
        ++successes;
        break;
      }
    }
  }
  return static_cast<double>(successes) / static_cast<double>(goals.size());
}

double evaluate(const QAgent& agent, GoalEnv& env, const std::vector<Vec>& goals) {
  Rng unused(0, 1);
  return evaluate(
      [&agent, &unused](const Vec& state, const Vec& goal) {
        return agent.act(state, goal, false, unused);
      },
      env, goals);
}

double evaluate(const AcAgent& agent, GoalEnv& env, const std::vector<Vec>& goals) {
  Rng unused(0, 1);
  return evaluate(
      [&agent, &unused](const Vec& state, const Vec& goal) {
        return agent.act(state, goal, false, unused);
      },
      env, goals);
}

}  // namespace ddcur
