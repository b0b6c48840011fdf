#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ddcur/core.hpp"

namespace ddcur {

/// Common surface of the goal-conditioned environments. An instance is
/// exclusively owned by one rollout loop; parallel rollouts use
/// separate instances with independent rng streams.
class GoalEnv {
 public:
  virtual ~GoalEnv() = default;

  virtual const EnvSpec& spec() const = 0;

  /// Starts a new episode toward desired_goal and returns the initial
  /// state. Start states are fixed per environment so "distance from
  /// s0" is well defined across episodes.
  virtual Vec reset(Rng& rng, const Vec& desired_goal) = 0;

  /// Applies one action. Returns (next_state, reward, done) where
  /// done is success or hitting the horizon.
  virtual std::tuple<Vec, double, bool> step(const Action& action) = 0;

  /// Projects a state into goal space.
  virtual Vec achieved_goal(const Vec& state) const = 0;

  /// Uniform draw over the goal space (free cells / the arena).
  virtual Vec sample_uniform_goal(Rng& rng) const = 0;

  /// Whether a goal vector is admissible for reset().
  virtual bool goal_valid(const Vec& goal) const = 0;

  /// The fixed initial state returned by reset().
  virtual Vec start_state() const = 0;

  /// Ground-truth-ish difficulty of a goal relative to the start:
  /// shortest-path steps for the grid, Euclidean distance for the
  /// arena. Telemetry only, never used for training.
  virtual double oracle_goal_distance(const Vec& goal) const = 0;

  virtual bool episode_active() const = 0;
  virtual int steps_taken() const = 0;
};

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

/// Two-dimensional grid navigation with walls, four deterministic move
/// actions and sparse goal rewards. States and goals are the
/// normalized cell-center coordinates ((x+0.5)/width, (y+0.5)/height);
/// the success radius is half the minimum inter-cell distance, so
/// success is exact cell match.
class GridNavEnv final : public GoalEnv {
 public:
  enum ActionId { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

  GridNavEnv(int width, int height, std::vector<Cell> walls, Cell start,
             int horizon);

  /// Default layout: two rooms split by a vertical wall with a single
  /// doorway in the middle.
  static GridNavEnv two_room(int width = 20, int height = 20,
                             int horizon = 50);

  /// Open grid without walls, start in the corner (0, 0).
  static GridNavEnv open(int width, int height, int horizon);

  /// Parses a rectangular map: '#' wall, '.' free, 'S' start.
  static GridNavEnv from_map(const std::string& text, int horizon);
  static GridNavEnv from_map_file(const std::filesystem::path& path,
                                  int horizon);

  const EnvSpec& spec() const override { return spec_; }
  Vec reset(Rng& rng, const Vec& desired_goal) override;
  std::tuple<Vec, double, bool> step(const Action& action) override;
  Vec achieved_goal(const Vec& state) const override;
  Vec sample_uniform_goal(Rng& rng) const override;
  bool goal_valid(const Vec& goal) const override;
  Vec start_state() const override { return encode_cell(start_); }
  double oracle_goal_distance(const Vec& goal) const override;
  bool episode_active() const override { return active_; }
  int steps_taken() const override { return steps_taken_; }

  int width() const { return width_; }
  int height() const { return height_; }
  Cell start_cell() const { return start_; }
  Cell agent_cell() const { return agent_; }
  bool in_bounds(Cell c) const;
  bool is_wall(Cell c) const;
  const std::vector<Cell>& free_cells() const { return free_cells_; }

  Vec encode_cell(Cell c) const;
  Cell decode_point(const Vec& point) const;

  /// Exact shortest-path step count between two free cells, walls
  /// respected; nullopt when unreachable. Breadth-first search.
  std::optional<int> oracle_distance(Cell from, Cell to) const;

 private:
  int cell_index(Cell c) const { return c.y * width_ + c.x; }
  void check_connectivity() const;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> wall_mask_;
  std::vector<Cell> free_cells_;
  Cell start_;
  EnvSpec spec_;

  Cell agent_;
  Vec desired_goal_;
  int steps_taken_ = 0;
  bool active_ = false;
};

/// Continuous point-mass reaching in the unit square. Actions are
/// 2-d displacements, clipped to length max_step; positions are
/// clipped to the arena.
class PointReachEnv final : public GoalEnv {
 public:
  explicit PointReachEnv(double max_step = 0.03, int horizon = 50,
                         double epsilon = 0.05);

  const EnvSpec& spec() const override { return spec_; }
  Vec reset(Rng& rng, const Vec& desired_goal) override;
  std::tuple<Vec, double, bool> step(const Action& action) override;
  Vec achieved_goal(const Vec& state) const override;
  Vec sample_uniform_goal(Rng& rng) const override;
  bool goal_valid(const Vec& goal) const override;
  Vec start_state() const override { return start_; }
  double oracle_goal_distance(const Vec& goal) const override;
  bool episode_active() const override { return active_; }
  int steps_taken() const override { return steps_taken_; }

  double max_step() const { return max_step_; }

 private:
  double max_step_;
  Vec start_;
  EnvSpec spec_;

  Vec pos_;
  Vec desired_goal_;
  int steps_taken_ = 0;
  bool active_ = false;
};

}  // namespace ddcur
