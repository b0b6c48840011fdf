#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <variant>
#include <vector>

#include "ddcur/errors.hpp"
#include "ddcur/rng.hpp"

namespace ddcur {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DiscreteActionSpace {
  int count = 0;
};

struct ContinuousActionSpace {
  int dim = 0;
  Vec low;   // per-dim lower bounds
  Vec high;  // per-dim upper bounds
};

using ActionSpace = std::variant<DiscreteActionSpace, ContinuousActionSpace>;

/// Discrete action index or continuous action vector.
using Action = std::variant<int, Vec>;

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Static description of a goal-conditioned environment.
struct EnvSpec {
  int state_dim = 0;
  ActionSpace action_space;
  int goal_dim = 0;
  int horizon = 0;    // max episode length in steps
  double epsilon = 0.0;  // success radius in goal space
  std::vector<Interval> goal_space_bounds;  // one interval per goal dim

  /// Throws on violated invariants (horizon >= 1, epsilon >= 0,
  /// nonempty bounds with low < high, positive dimensions).
  void validate() const;
};

/// One goal-conditioned environment step.
struct Transition {
  Vec state;
  Action action;
  Vec next_state;
  Vec achieved_goal;  // goal realized at next_state
  Vec desired_goal;
  double reward = -1.0;  // 0 on success, -1 otherwise
  bool done = false;
};

/// Ordered trajectory of transitions; the unit of replay storage and
/// of distance-model supervision.
struct Episode {
  std::vector<Transition> transitions;

  int length() const { return static_cast<int>(transitions.size()); }

  /// Structural invariants: length >= 1, states chain exactly
  /// (next_state of i equals state of i+1), one shared desired goal.
  /// Throws InvalidEpisodeError.
  void validate() const;
};

/// Euclidean distance between two goal vectors.
double goal_distance(const Vec& a, const Vec& b);

/// 0 when goal_distance(achieved, desired) < epsilon, else -1.
/// Ties at exactly epsilon count as failures.
double sparse_reward(const Vec& achieved, const Vec& desired, double epsilon);

}  // namespace ddcur
