#include "ddcur/envs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace ddcur {

namespace {

EnvSpec make_grid_spec(int width, int height, int horizon) {
  EnvSpec spec;
  spec.state_dim = 2;
  spec.action_space = DiscreteActionSpace{4};
  spec.goal_dim = 2;
  spec.horizon = horizon;
  // Success radius below the minimum inter-cell distance of the
  // normalized encoding: success is exact cell match.
  spec.epsilon = 0.5 * std::min(1.0 / width, 1.0 / height);
  spec.goal_space_bounds = {{0.0, 1.0}, {0.0, 1.0}};
  spec.validate();
  return spec;
}

}  // namespace

GridNavEnv::GridNavEnv(int width, int height, std::vector<Cell> walls,
                       Cell start, int horizon)
    : width_(width), height_(height), start_(start) {
  if (width < 1 || height < 1) throw ConfigError("GridNavEnv: empty grid");
  wall_mask_.assign(static_cast<std::size_t>(width) * height, 0);
  for (Cell w : walls) {
    if (!in_bounds(w)) throw InvalidCellError("GridNavEnv: wall out of bounds");
    wall_mask_[cell_index(w)] = 1;
  }
  if (!in_bounds(start) || wall_mask_[cell_index(start)]) {
    throw InvalidCellError("GridNavEnv: start cell blocked or out of bounds");
  }
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!wall_mask_[cell_index({x, y})]) free_cells_.push_back({x, y});
    }
  }
  spec_ = make_grid_spec(width, height, horizon);
  check_connectivity();
}

GridNavEnv GridNavEnv::two_room(int width, int height, int horizon) {
  if (width < 3 || height < 1) throw ConfigError("two_room: grid too small");
  std::vector<Cell> walls;
  const int wall_x = width / 2;
  const int door_y = height / 2;
  for (int y = 0; y < height; ++y) {
    if (y != door_y) walls.push_back({wall_x, y});
  }
  return GridNavEnv(width, height, std::move(walls), {0, 0}, horizon);
}

GridNavEnv GridNavEnv::open(int width, int height, int horizon) {
  return GridNavEnv(width, height, {}, {0, 0}, horizon);
}

GridNavEnv GridNavEnv::from_map(const std::string& text, int horizon) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("map: no rows");
  const std::size_t width = rows.front().size();
  std::vector<Cell> walls;
  std::optional<Cell> start;
  for (int y = 0; y < static_cast<int>(rows.size()); ++y) {
    if (rows[y].size() != width) throw ConfigError("map: rows must be equal length");
    for (int x = 0; x < static_cast<int>(width); ++x) {
      switch (rows[y][x]) {
        case '#':
          walls.push_back({x, y});
          break;
        case '.':
          break;
        case 'S':
          if (start) throw ConfigError("map: multiple start cells");
          start = Cell{x, y};
          break;
        default:
          throw ConfigError("map: unknown character");
      }
    }
  }
  if (!start) throw ConfigError("map: missing start cell 'S'");
  return GridNavEnv(static_cast<int>(width), static_cast<int>(rows.size()),
                    std::move(walls), *start, horizon);
}

GridNavEnv GridNavEnv::from_map_file(const std::filesystem::path& path,
                                     int horizon) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open map file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_map(text.str(), horizon);
}

bool GridNavEnv::in_bounds(Cell c) const {
  return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
}

bool GridNavEnv::is_wall(Cell c) const {
  return wall_mask_[cell_index(c)] != 0;
}

Vec GridNavEnv::encode_cell(Cell c) const {
  Vec v(2);
  v << (c.x + 0.5) / width_, (c.y + 0.5) / height_;
  return v;
}

Cell GridNavEnv::decode_point(const Vec& point) const {
  if (point.size() != 2) throw DimensionError("decode_point: expected 2-d point");
  const int x = std::clamp(static_cast<int>(std::floor(point[0] * width_)), 0,
                           width_ - 1);
  const int y = std::clamp(static_cast<int>(std::floor(point[1] * height_)), 0,
                           height_ - 1);
  return {x, y};
}

Vec GridNavEnv::reset(Rng& /*rng*/, const Vec& desired_goal) {
  if (desired_goal.size() != 2) throw InvalidGoalError("reset: goal must be 2-d");
  for (int i = 0; i < 2; ++i) {
    if (desired_goal[i] < 0.0 || desired_goal[i] > 1.0) {
      throw InvalidGoalError("reset: goal outside the grid");
    }
  }
  const Cell goal_cell = decode_point(desired_goal);
  if (is_wall(goal_cell)) throw InvalidGoalError("reset: goal cell is a wall");
  agent_ = start_;
  desired_goal_ = desired_goal;
  steps_taken_ = 0;
  active_ = true;
  return encode_cell(agent_);
}

std::tuple<Vec, double, bool> GridNavEnv::step(const Action& action) {
  if (!active_) throw EpisodeFinishedError("step: episode not active");
  const int* a = std::get_if<int>(&action);
  if (!a) throw InvalidActionError("step: GridNav takes a discrete action");
  Cell next = agent_;
  switch (*a) {
    case kUp: next.y -= 1; break;
    case kDown: next.y += 1; break;
    case kLeft: next.x -= 1; break;
    case kRight: next.x += 1; break;
    default: throw InvalidActionError("step: action index out of range");
  }
  if (in_bounds(next) && !is_wall(next)) agent_ = next;
  ++steps_taken_;
  const Vec state = encode_cell(agent_);
  const double reward =
      sparse_reward(achieved_goal(state), desired_goal_, spec_.epsilon);
  const bool done = reward == 0.0 || steps_taken_ == spec_.horizon;
  if (done) active_ = false;
  return {state, reward, done};
}

Vec GridNavEnv::achieved_goal(const Vec& state) const {
  if (state.size() != 2) throw DimensionError("achieved_goal: expected 2-d state");
  return state;
}

Vec GridNavEnv::sample_uniform_goal(Rng& rng) const {
  const Cell c = free_cells_[rng.index(free_cells_.size())];
  return encode_cell(c);
}

bool GridNavEnv::goal_valid(const Vec& goal) const {
  if (goal.size() != 2) return false;
  for (int i = 0; i < 2; ++i) {
    if (goal[i] < 0.0 || goal[i] > 1.0) return false;
  }
  return !is_wall(decode_point(goal));
}

double GridNavEnv::oracle_goal_distance(const Vec& goal) const {
  const auto d = oracle_distance(start_, decode_point(goal));
  if (!d) throw InvalidCellError("oracle_goal_distance: goal unreachable");
  return static_cast<double>(*d);
}

std::optional<int> GridNavEnv::oracle_distance(Cell from, Cell to) const {
  if (!in_bounds(from) || is_wall(from) || !in_bounds(to) || is_wall(to)) {
    throw InvalidCellError("oracle_distance: cell blocked or out of bounds");
  }
  std::vector<int> dist(wall_mask_.size(), -1);
  std::deque<Cell> queue;
  dist[cell_index(from)] = 0;
  queue.push_back(from);
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == to) return dist[cell_index(c)];
    const Cell neighbors[4] = {
        {c.x, c.y - 1}, {c.x, c.y + 1}, {c.x - 1, c.y}, {c.x + 1, c.y}};
    for (Cell n : neighbors) {
      if (!in_bounds(n) || is_wall(n)) continue;
      if (dist[cell_index(n)] >= 0) continue;
      dist[cell_index(n)] = dist[cell_index(c)] + 1;
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

void GridNavEnv::check_connectivity() const {
  std::vector<std::uint8_t> seen(wall_mask_.size(), 0);
  std::deque<Cell> queue;
  seen[cell_index(start_)] = 1;
  queue.push_back(start_);
  std::size_t reached = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    ++reached;
    const Cell neighbors[4] = {
        {c.x, c.y - 1}, {c.x, c.y + 1}, {c.x - 1, c.y}, {c.x + 1, c.y}};
    for (Cell n : neighbors) {
      if (!in_bounds(n) || is_wall(n) || seen[cell_index(n)]) continue;
      seen[cell_index(n)] = 1;
      queue.push_back(n);
    }
  }
  if (reached != free_cells_.size()) {
    throw ConfigError("GridNavEnv: free cells are not all reachable");
  }
}

PointReachEnv::PointReachEnv(double max_step, int horizon, double epsilon)
    : max_step_(max_step) {
  if (max_step <= 0.0) throw ConfigError("PointReachEnv: max_step must be > 0");
  start_ = Vec(2);
  start_ << 0.1, 0.1;
  spec_.state_dim = 2;
  Vec low(2), high(2);
  low << -max_step, -max_step;
  high << max_step, max_step;
  spec_.action_space = ContinuousActionSpace{2, low, high};
  spec_.goal_dim = 2;
  spec_.horizon = horizon;
  spec_.epsilon = epsilon;
  spec_.goal_space_bounds = {{0.0, 1.0}, {0.0, 1.0}};
  spec_.validate();
}

Vec PointReachEnv::reset(Rng& /*rng*/, const Vec& desired_goal) {
  if (!goal_valid(desired_goal)) {
    throw InvalidGoalError("reset: goal outside the arena");
  }
  pos_ = start_;
  desired_goal_ = desired_goal;
  steps_taken_ = 0;
  active_ = true;
  return pos_;
}

std::tuple<Vec, double, bool> PointReachEnv::step(const Action& action) {
  if (!active_) throw EpisodeFinishedError("step: episode not active");
  const Vec* a = std::get_if<Vec>(&action);
  if (!a) throw InvalidActionError("step: PointReach takes a continuous action");
  if (a->size() != 2) throw InvalidActionError("step: action must be 2-d");
  if (!a->allFinite()) throw InvalidActionError("step: non-finite action");
  Vec delta = *a;
  const double norm = delta.norm();
  if (norm > max_step_) delta *= max_step_ / norm;
  pos_ = (pos_ + delta).cwiseMax(0.0).cwiseMin(1.0);
  ++steps_taken_;
  const double reward =
      sparse_reward(achieved_goal(pos_), desired_goal_, spec_.epsilon);
  const bool done = reward == 0.0 || steps_taken_ == spec_.horizon;
  if (done) active_ = false;
  return {pos_, reward, done};
}

Vec PointReachEnv::achieved_goal(const Vec& state) const {
  if (state.size() != 2) throw DimensionError("achieved_goal: expected 2-d state");
  return state;
}

Vec PointReachEnv::sample_uniform_goal(Rng& rng) const {
  Vec g(2);
  g << rng.uniform(), rng.uniform();
  return g;
}

bool PointReachEnv::goal_valid(const Vec& goal) const {
  if (goal.size() != 2) return false;
  return goal[0] >= 0.0 && goal[0] <= 1.0 && goal[1] >= 0.0 && goal[1] <= 1.0;
}

double PointReachEnv::oracle_goal_distance(const Vec& goal) const {
  return (goal - start_).norm();
}

}  // namespace ddcur
