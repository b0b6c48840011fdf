#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "ddcur/core.hpp"
#include "ddcur/nn.hpp"

namespace ddcur {

/// Geometric discretization of the step-count range [0, horizon] into
/// num_bins half-open intervals (u_{k-1}, u_k], 1-indexed, with
/// u_k = round(horizon^(k/num_bins)) and the last bound forced to the
/// horizon. A step count of 0 falls into bin 1.
struct BinSpec {
  int num_bins = 0;
  int horizon = 0;
  std::vector<int> upper_bounds;  // strictly increasing, back() == horizon
};

/// Throws BinningError when the bounds collide (always when
/// horizon < num_bins).
BinSpec make_bin_spec(int horizon, int num_bins);

/// Unique bin index in [1, num_bins] for a step count in [0, horizon].
int bin_of(int steps, const BinSpec& spec);

/// Two states from the same episode, steps apart (j - i >= 0).
struct DistancePair {
  Vec from;
  Vec to;
  int steps = 0;
};

using PairDataset = std::vector<std::pair<DistancePair, int>>;  // (pair, bin)

/// Draws pairs_per_episode labeled pairs per episode, class-balanced:
/// the target bin is drawn uniformly among bins feasible for the
/// episode length, then (i, j) uniformly among index pairs whose gap
/// lies in that bin. Pair endpoints come from the stored state
/// sequence s_0..s_L (i indexes transitions, j >= i may be the final
/// state); duplicates are allowed.
PairDataset build_pair_dataset(const std::vector<Episode>& episodes,
                               int pairs_per_episode, const BinSpec& spec,
                               Rng& rng);

/// Bin classifier over concatenated state pairs.
struct DdfModel {
  Mlp net;  // input 2 * state_dim, output num_bins logits
  BinSpec bin_spec;

  static DdfModel create(int state_dim, const BinSpec& spec,
                         const std::vector<int>& hidden, Rng& rng);
};

/// Minibatch cross-entropy training; deterministic given the rng.
/// Returns the final epoch's mean loss.
double train_ddf(DdfModel& model, const PairDataset& dataset, int epochs,
                 int batch_size, Rng& rng, double learning_rate = 1e-3);

/// (bin, logits) for a state pair; argmax with ties broken toward the
/// lower bin index.
std::pair<int, Vec> predict_bin(const DdfModel& model, const Vec& s0,
                                const Vec& s);

/// Fraction of dataset pairs whose predicted bin matches the label.
double exact_bin_accuracy(const DdfModel& model, const PairDataset& dataset);

/// True when interval_steps or more environment steps have elapsed
/// since the last training.
bool retrain_schedule_due(std::int64_t total_env_steps,
                          std::int64_t interval_steps,
                          std::int64_t last_trained_at);

/// Checkpoints: BinSpec header followed by the nn blob.
void save_ddf(std::ostream& out, const DdfModel& model);
DdfModel load_ddf(std::istream& in);
void save_ddf_file(const std::filesystem::path& path, const DdfModel& model);
DdfModel load_ddf_file(const std::filesystem::path& path);

}  // namespace ddcur
