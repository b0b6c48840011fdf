#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ddcur {

/// Deterministic random stream identified by a (seed, stream) pair.
///
/// Equal (seed, stream) pairs produce identical draw sequences on every
/// platform: the engine is the fully specified std::mt19937_64 and all
/// distributions are implemented here instead of relying on the
/// implementation-defined standard-library ones. Consumers that must not
/// perturb each other (environment, agent, replay sampling, distance
/// model, goal generator) each own their own stream id.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [lo, hi], both ends inclusive. Unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal draw (Box-Muller, second value cached).
  double normal();
  double normal(double mean, double stddev);

  /// True with probability p.
  bool bernoulli(double p);

  /// Fisher-Yates shuffle driven by this stream.
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ddcur
