#include "ddcur/replay.hpp"

#include <algorithm>

namespace ddcur {

ReplayBuffer::ReplayBuffer(std::int64_t capacity_transitions)
    : capacity_(capacity_transitions) {
  if (capacity_ < 1) throw ConfigError("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push_episode(Episode episode) {
  episode.validate();
  const std::int64_t len = episode.length();
  if (len > capacity_) {
    throw InvalidEpisodeError("push_episode: episode longer than the buffer");
  }
  while (stored_ + len > capacity_) {
    stored_ -= episodes_.front().length();
    episodes_.pop_front();
    ends_.pop_front();
  }
  stored_ += len;
  total_steps_stored_ += len;
  episodes_.push_back(std::move(episode));
  ends_.push_back(total_steps_stored_);
}

const Transition& ReplayBuffer::transition_at(std::int64_t flat_index,
                                              std::size_t* episode_index,
                                              int* offset) const {
  // Translate the 0-based flat index over stored transitions into
  // all-time coordinates, then locate the owning episode.
  const std::int64_t base = ends_.front() - episodes_.front().length();
  const std::int64_t target = base + flat_index;
  const auto it = std::upper_bound(ends_.begin(), ends_.end(), target);
  const std::size_t e = static_cast<std::size_t>(it - ends_.begin());
  const Episode& ep = episodes_[e];
  const int off = static_cast<int>(target - (ends_[e] - ep.length()));
  if (episode_index) *episode_index = e;
  if (offset) *offset = off;
  return ep.transitions[off];
}

std::vector<Transition> ReplayBuffer::sample_her_batch(int batch_size,
                                                       const HerConfig& her,
                                                       double epsilon,
                                                       Rng& rng) const {
  if (batch_size < 0) throw ConfigError("sample_her_batch: negative batch size");
  if (her.k < 0) throw ConfigError("sample_her_batch: k must be >= 0");
  if (batch_size == 0) return {};
  if (empty()) throw EmptyBufferError("sample_her_batch: buffer is empty");
  const double relabel_prob = static_cast<double>(her.k) / (her.k + 1);
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    std::size_t e = 0;
    int off = 0;
    Transition t = transition_at(rng.index(stored_), &e, &off);
    if (rng.bernoulli(relabel_prob)) {
      const Episode& ep = episodes_[e];
      const int j = rng.uniform_int(off, ep.length() - 1);
      t.desired_goal = ep.transitions[j].achieved_goal;
      t.reward = sparse_reward(t.achieved_goal, t.desired_goal, epsilon);
      t.done = t.reward == 0.0;
    }
    batch.push_back(std::move(t));
  }
  return batch;
}

std::vector<Episode> ReplayBuffer::recent_slice(std::int64_t n_steps) const {
  std::vector<Episode> slice;
  std::int64_t covered = 0;
  for (auto it = episodes_.rbegin(); it != episodes_.rend(); ++it) {
    if (covered >= n_steps) break;
    slice.push_back(*it);
    covered += it->length();
  }
  std::reverse(slice.begin(), slice.end());
  return slice;
}

std::vector<std::pair<Vec, Vec>> ReplayBuffer::sample_states(int n,
                                                             Rng& rng) const {
  if (n < 0) throw ConfigError("sample_states: negative count");
  if (n == 0) return {};
  if (empty()) throw EmptyBufferError("sample_states: buffer is empty");
  std::vector<std::pair<Vec, Vec>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Transition& t = transition_at(rng.index(stored_));
    out.emplace_back(t.next_state, t.achieved_goal);
  }
  return out;
}

}  // namespace ddcur
