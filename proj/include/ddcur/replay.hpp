#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "ddcur/core.hpp"

namespace ddcur {

/// Hindsight relabeling parameters. Strategy is fixed to "future":
/// relabel goals come from the same episode at the same or a later
/// step. k is the expected ratio of relabeled to original samples.
struct HerConfig {
  int k = 4;
};

/// Episodic ring buffer with capacity counted in transitions.
/// Eviction is oldest-episode-first and always whole episodes, so
/// distance-pair extraction never sees truncated trajectories.
///
/// Single writer; readers must not overlap a push.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::int64_t capacity_transitions);

  /// Appends a (structurally validated) episode, evicting oldest
  /// episodes until the capacity holds. An episode longer than the
  /// whole buffer is rejected.
  void push_episode(Episode episode);

  std::int64_t capacity() const { return capacity_; }
  std::int64_t size() const { return stored_; }  // transitions currently held
  std::int64_t total_steps_stored() const { return total_steps_stored_; }
  std::size_t episode_count() const { return episodes_.size(); }
  const Episode& episode(std::size_t i) const { return episodes_[i]; }  // 0 = oldest
  bool empty() const { return stored_ == 0; }

  /// batch_size transitions drawn uniformly over all stored
  /// transitions. Each is relabeled with probability k/(k+1): the
  /// desired goal becomes the achieved goal of a uniformly drawn
  /// transition at the same or a later index of the same episode, and
  /// the reward is recomputed against the new goal.
  std::vector<Transition> sample_her_batch(int batch_size, const HerConfig& her,
                                           double epsilon, Rng& rng) const;

  /// Most recent whole episodes covering at least n_steps transitions;
  /// the episode at the boundary is included. Returned oldest-first.
  std::vector<Episode> recent_slice(std::int64_t n_steps) const;

  /// n draws (with replacement) of (next_state, achieved_goal),
  /// uniform over all stored transitions.
  std::vector<std::pair<Vec, Vec>> sample_states(int n, Rng& rng) const;

 private:
  const Transition& transition_at(std::int64_t flat_index,
                                  std::size_t* episode_index = nullptr,
                                  int* offset = nullptr) const;

  std::int64_t capacity_;
  std::int64_t stored_ = 0;
  std::int64_t total_steps_stored_ = 0;
  std::deque<Episode> episodes_;
  // All-time cumulative end index per stored episode (parallel to
  // episodes_); flat indices resolve via binary search over this.
  std::deque<std::int64_t> ends_;
};

}  // namespace ddcur
