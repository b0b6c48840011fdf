#include "ddcur/ddf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace ddcur {

BinSpec make_bin_spec(int horizon, int num_bins) {
  if (num_bins < 1) throw BinningError("make_bin_spec: need at least one bin");
  if (horizon < 1) throw BinningError("make_bin_spec: horizon must be >= 1");
  BinSpec spec;
  spec.num_bins = num_bins;
  spec.horizon = horizon;
  spec.upper_bounds.resize(num_bins);
  for (int k = 1; k <= num_bins; ++k) {
    const double exponent = static_cast<double>(k) / num_bins;
    spec.upper_bounds[k - 1] =
        static_cast<int>(std::llround(std::pow(horizon, exponent)));
  }
  spec.upper_bounds.back() = horizon;
  for (int k = 1; k < num_bins; ++k) {
    if (spec.upper_bounds[k] <= spec.upper_bounds[k - 1]) {
      throw BinningError("make_bin_spec: duplicate bin bounds; fewer bins needed");
    }
  }
  return spec;
}

int bin_of(int steps, const BinSpec& spec) {
  if (steps < 0 || steps > spec.horizon) {
    throw BinningError("bin_of: step count outside [0, horizon]");
  }
  const auto it = std::lower_bound(spec.upper_bounds.begin(),
                                   spec.upper_bounds.end(), steps);
  return static_cast<int>(it - spec.upper_bounds.begin()) + 1;
}

PairDataset build_pair_dataset(const std::vector<Episode>& episodes,
                               int pairs_per_episode, const BinSpec& spec,
                               Rng& rng) {
  if (episodes.empty()) throw EmptyDatasetError("build_pair_dataset: no episodes");
  if (pairs_per_episode < 0) {
    throw ConfigError("build_pair_dataset: negative pair count");
  }
  PairDataset dataset;
  dataset.reserve(static_cast<std::size_t>(episodes.size()) * pairs_per_episode);
  for (const Episode& ep : episodes) {
    const int len = ep.length();
    if (len > spec.horizon) {
      throw InvalidEpisodeError("build_pair_dataset: episode exceeds horizon");
    }
    // Gap ranges feasible within this episode, one [lo, hi] per bin.
    // Pair counts per gap: L for gap 0, L - g + 1 otherwise (the
    // "from" index ranges over transitions, the "to" index may also
    // land on the final state).
    struct BinRange {
      int bin, lo, hi;
    };
    std::vector<BinRange> feasible;
    int prev_bound = -1;
    for (int k = 1; k <= spec.num_bins; ++k) {
      const int lo = std::max(0, prev_bound + 1);
      const int hi = std::min(spec.upper_bounds[k - 1], len);
      if (lo <= hi) feasible.push_back({k, lo, hi});
      prev_bound = spec.upper_bounds[k - 1];
    }
    auto pairs_for_gap = [len](int g) { return g == 0 ? len : len - g + 1; };
    for (int p = 0; p < pairs_per_episode; ++p) {
      const BinRange& range = feasible[rng.index(feasible.size())];
      std::int64_t total = 0;
      for (int g = range.lo; g <= range.hi; ++g) total += pairs_for_gap(g);
      std::int64_t r = rng.index(total);
      int gap = range.lo;
      while (r >= pairs_for_gap(gap)) {
        r -= pairs_for_gap(gap);
        ++gap;
      }
      const int i = static_cast<int>(r);
      const int j = i + gap;
      DistancePair pair;
      pair.from = ep.transitions[i].state;
      pair.to = j < len ? ep.transitions[j].state : ep.transitions[len - 1].next_state;
      pair.steps = gap;
      dataset.emplace_back(std::move(pair), range.bin);
    }
  }
  return dataset;
}

DdfModel DdfModel::create(int state_dim, const BinSpec& spec,
                          const std::vector<int>& hidden, Rng& rng) {
  if (state_dim < 1) throw DimensionError("DdfModel: state_dim must be positive");
  std::vector<int> sizes;
  sizes.push_back(2 * state_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(spec.num_bins);
  DdfModel model;
  model.net = Mlp::random_init(sizes, rng);
  model.bin_spec = spec;
  return model;
}

double train_ddf(DdfModel& model, const PairDataset& dataset, int epochs,
                 int batch_size, Rng& rng, double learning_rate) {
  if (dataset.empty()) throw EmptyDatasetError("train_ddf: empty dataset");
  if (epochs < 1 || batch_size < 1) {
    throw ConfigError("train_ddf: epochs and batch_size must be >= 1");
  }
  const int input_dim = model.net.input_dim();
  const std::size_t n = dataset.size();
  Mat inputs(input_dim, n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [pair, bin] = dataset[i];
    if (bin < 1 || bin > model.bin_spec.num_bins) {
      throw LabelError("train_ddf: bin label out of range");
    }
    if (pair.from.size() + pair.to.size() != input_dim) {
      throw DimensionError("train_ddf: pair dims do not match the model");
    }
    inputs.col(i) << pair.from, pair.to;
    labels[i] = bin - 1;
  }
  AdamState opt = AdamState::for_net(model.net, learning_rate);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double epoch_loss = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min<std::size_t>(batch_size, n - start);
      Mat batch(input_dim, count);
      std::vector<int> batch_labels(count);
      for (std::size_t i = 0; i < count; ++i) {
        batch.col(i) = inputs.col(order[start + i]);
        batch_labels[i] = labels[order[start + i]];
      }
      const auto [loss, grads] = backward_cross_entropy(model.net, batch, batch_labels);
      adam_step(model.net, grads, opt);
      epoch_loss += loss * static_cast<double>(count);
    }
    epoch_loss /= static_cast<double>(n);
  }
  return epoch_loss;
}

std::pair<int, Vec> predict_bin(const DdfModel& model, const Vec& s0,
                                const Vec& s) {
  if (s0.size() + s.size() != model.net.input_dim()) {
    throw DimensionError("predict_bin: state dims do not match the model");
  }
  Vec input(s0.size() + s.size());
  input << s0, s;
  Vec logits = model.net.forward(input);
  int best = 0;
  for (int i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;  // ties keep the lower bin
  }
  return {best + 1, std::move(logits)};
}

double exact_bin_accuracy(const DdfModel& model, const PairDataset& dataset) {
  if (dataset.empty()) throw EmptyDatasetError("exact_bin_accuracy: empty dataset");
  std::int64_t hits = 0;
  for (const auto& [pair, bin] : dataset) {
    if (predict_bin(model, pair.from, pair.to).first == bin) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

bool retrain_schedule_due(std::int64_t total_env_steps,
                          std::int64_t interval_steps,
                          std::int64_t last_trained_at) {
  if (total_env_steps < 0 || last_trained_at < 0) {
    throw ConfigError("retrain_schedule_due: negative step counter");
  }
  if (interval_steps < 1) {
    throw ConfigError("retrain_schedule_due: interval must be >= 1");
  }
  return total_env_steps - last_trained_at >= interval_steps;
}

namespace {
constexpr char kDdfMagic[4] = {'D', 'D', 'F', '1'};
}

void save_ddf(std::ostream& out, const DdfModel& model) {
  out.write(kDdfMagic, sizeof(kDdfMagic));
  const std::int64_t num_bins = model.bin_spec.num_bins;
  const std::int64_t horizon = model.bin_spec.horizon;
  out.write(reinterpret_cast<const char*>(&num_bins), sizeof(num_bins));
  out.write(reinterpret_cast<const char*>(&horizon), sizeof(horizon));
  for (int u : model.bin_spec.upper_bounds) {
    const std::int64_t bound = u;
    out.write(reinterpret_cast<const char*>(&bound), sizeof(bound));
  }
  save_mlp(out, model.net);
}

DdfModel load_ddf(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDdfMagic, sizeof(kDdfMagic)) != 0) {
    throw IoError("ddf checkpoint: bad magic");
  }
  auto read_i64 = [&in]() {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw IoError("ddf checkpoint: truncated");
    return v;
  };
  DdfModel model;
  const std::int64_t num_bins = read_i64();
  const std::int64_t horizon = read_i64();
  if (num_bins < 1 || num_bins > 1024 || horizon < 1) {
    throw IoError("ddf checkpoint: bad bin header");
  }
  model.bin_spec.num_bins = static_cast<int>(num_bins);
  model.bin_spec.horizon = static_cast<int>(horizon);
  model.bin_spec.upper_bounds.resize(num_bins);
  for (auto& u : model.bin_spec.upper_bounds) u = static_cast<int>(read_i64());
  model.net = load_mlp(in);
  if (model.net.output_dim() != model.bin_spec.num_bins) {
    throw IoError("ddf checkpoint: bin count and network head disagree");
  }
  return model;
}

void save_ddf_file(const std::filesystem::path& path, const DdfModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_ddf(out, model);
}

DdfModel load_ddf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return load_ddf(in);
}

}  // namespace ddcur
