#include "ddcur/core.hpp"

#include <cmath>

namespace ddcur {

void EnvSpec::validate() const {
  if (state_dim < 1) throw ConfigError("EnvSpec: state_dim must be positive");
  if (goal_dim < 1) throw ConfigError("EnvSpec: goal_dim must be positive");
  if (horizon < 1) throw ConfigError("EnvSpec: horizon must be >= 1");
  if (epsilon < 0.0) throw ConfigError("EnvSpec: epsilon must be >= 0");
  if (goal_space_bounds.size() != static_cast<std::size_t>(goal_dim)) {
    throw ConfigError("EnvSpec: one goal bound per goal dimension required");
  }
  for (const Interval& b : goal_space_bounds) {
    if (!(b.low < b.high)) throw ConfigError("EnvSpec: empty goal bound interval");
  }
  if (const auto* d = std::get_if<DiscreteActionSpace>(&action_space)) {
    if (d->count < 1) throw ConfigError("EnvSpec: discrete action count must be positive");
  } else {
    const auto& c = std::get<ContinuousActionSpace>(action_space);
    if (c.dim < 1) throw ConfigError("EnvSpec: continuous action dim must be positive");
    if (c.low.size() != c.dim || c.high.size() != c.dim) {
      throw ConfigError("EnvSpec: action bounds must match action dim");
    }
    for (int i = 0; i < c.dim; ++i) {
      if (!(c.low[i] < c.high[i])) throw ConfigError("EnvSpec: empty action bound interval");
    }
  }
}

void Episode::validate() const {
  if (transitions.empty()) throw InvalidEpisodeError("episode must have length >= 1");
  const Vec& goal = transitions.front().desired_goal;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Transition& t = transitions[i];
    if (t.desired_goal != goal) {
      throw InvalidEpisodeError("episode transitions must share one desired goal");
    }
    if (i + 1 < transitions.size() && t.next_state != transitions[i + 1].state) {
      throw InvalidEpisodeError("episode states must chain");
    }
  }
}

double goal_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("goal_distance: length mismatch");
  return (a - b).norm();
}

double sparse_reward(const Vec& achieved, const Vec& desired, double epsilon) {
  return goal_distance(achieved, desired) < epsilon ? 0.0 : -1.0;
}

}  // namespace ddcur
