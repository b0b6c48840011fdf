#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>

#include "ddcur/ddf.hpp"
#include "test_helpers.hpp"

using namespace ddcur;
namespace dt = ddcur::testing;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

/// 1-d walk of `length` steps with evenly spaced states; the true step
/// distance between state i and state j is |j - i|.
Episode walk_episode(int length) {
  Episode ep;
  const Vec goal = vec2(10.0, 10.0);
  for (int i = 0; i < length; ++i) {
    Transition t;
    t.state = vec2(0.01 * i, 0.0);
    t.action = 0;
    t.next_state = vec2(0.01 * (i + 1), 0.0);
    t.achieved_goal = t.next_state;
    t.desired_goal = goal;
    t.reward = -1.0;
    t.done = (i + 1 == length);
    ep.transitions.push_back(std::move(t));
  }
  return ep;
}

int true_gap(const DistancePair& pair) {
  return static_cast<int>(std::llround((pair.to[0] - pair.from[0]) / 0.01));
}

}  // namespace

TEST_CASE("geometric bounds for horizon 50 with 5 bins") {
  const BinSpec spec = make_bin_spec(50, 5);
  CHECK(spec.upper_bounds == std::vector<int>{2, 5, 10, 23, 50});
  CHECK(spec.num_bins == 5);
  CHECK(spec.horizon == 50);
}

TEST_CASE("geometric bounds for horizon 100 with 4 bins") {
  const BinSpec spec = make_bin_spec(100, 4);
  CHECK(spec.upper_bounds == std::vector<int>{3, 10, 32, 100});
}

TEST_CASE("the last bound is forced to the horizon") {
  for (int horizon : {7, 30, 50, 64, 100, 500}) {
    for (int bins : {1, 2, 3, 4}) {
      const BinSpec spec = make_bin_spec(horizon, bins);
      CHECK(spec.upper_bounds.back() == horizon);
      for (std::size_t i = 1; i < spec.upper_bounds.size(); ++i) {
        CHECK(spec.upper_bounds[i] > spec.upper_bounds[i - 1]);
      }
    }
  }
}

TEST_CASE("colliding bounds are rejected") {
  // 10^(1/8) rounds to 1 for the first two bounds
  CHECK_THROWS_AS(make_bin_spec(10, 8), BinningError);
  // more bins than steps can never work
  CHECK_THROWS_AS(make_bin_spec(4, 5), BinningError);
  CHECK_THROWS_AS(make_bin_spec(50, 0), BinningError);
  CHECK_THROWS_AS(make_bin_spec(0, 1), BinningError);
}

TEST_CASE("bin_of places the documented examples") {
  const BinSpec spec = make_bin_spec(50, 5);
  CHECK(bin_of(0, spec) == 1);
  CHECK(bin_of(1, spec) == 1);
  CHECK(bin_of(2, spec) == 1);
  CHECK(bin_of(3, spec) == 2);
  CHECK(bin_of(4, spec) == 2);
  CHECK(bin_of(5, spec) == 2);
  CHECK(bin_of(6, spec) == 3);
  CHECK(bin_of(10, spec) == 3);
  CHECK(bin_of(23, spec) == 4);
  CHECK(bin_of(24, spec) == 5);
  CHECK(bin_of(50, spec) == 5);
}

TEST_CASE("bins partition the step range exhaustively") {
  for (int horizon : {20, 50, 100}) {
    for (int bins : {2, 4, 5}) {
      const BinSpec spec = make_bin_spec(horizon, bins);
      int prev = bin_of(0, spec);
      CHECK(prev == 1);
      std::map<int, int> counts;
      for (int s = 0; s <= horizon; ++s) {
        const int b = bin_of(s, spec);
        CHECK(b >= 1);
        CHECK(b <= bins);
        CHECK(b >= prev);        // non-decreasing in steps
        CHECK(b - prev <= 1);    // no bin skipped
        prev = b;
        ++counts[b];
      }
      CHECK(static_cast<int>(counts.size()) == bins);  // every bin non-empty
      CHECK(bin_of(horizon, spec) == bins);
    }
  }
}

TEST_CASE("bin_of rejects out-of-range step counts") {
  const BinSpec spec = make_bin_spec(50, 5);
  CHECK_THROWS_AS(bin_of(-1, spec), BinningError);
  CHECK_THROWS_AS(bin_of(51, spec), BinningError);
}

TEST_CASE("pair labels agree with recomputing the bin from the gap") {
  const BinSpec spec = make_bin_spec(50, 5);
  std::vector<Episode> episodes = {walk_episode(50), walk_episode(30),
                                   walk_episode(7)};
  Rng rng(3, 0);
  const PairDataset data = build_pair_dataset(episodes, 200, spec, rng);
  CHECK(data.size() == 600);
  for (const auto& [pair, label] : data) {
    const int gap = true_gap(pair);
    CHECK(gap == pair.steps);
    CHECK(gap >= 0);
    CHECK(label == bin_of(gap, spec));
  }
}

TEST_CASE("a one-step episode only yields the two possible pairs") {
  const BinSpec spec = make_bin_spec(50, 5);
  std::vector<Episode> episodes = {walk_episode(1)};
  Rng rng(5, 0);
  const PairDataset data = build_pair_dataset(episodes, 100, spec, rng);
  REQUIRE(data.size() == 100);
  int zero_gap = 0, one_gap = 0;
  for (const auto& [pair, label] : data) {
    CHECK(pair.from == vec2(0.0, 0.0));
    CHECK(label == 1);
    if (pair.steps == 0) {
      CHECK(pair.to == vec2(0.0, 0.0));
      ++zero_gap;
    } else {
      REQUIRE(pair.steps == 1);
      CHECK(pair.to == vec2(0.01, 0.0));
      ++one_gap;
    }
  }
  CHECK(zero_gap + one_gap == 100);
  CHECK(zero_gap > 0);
  CHECK(one_gap > 0);
}

TEST_CASE("pair endpoints may include the final state") {
  const BinSpec spec = make_bin_spec(50, 5);
  std::vector<Episode> episodes = {walk_episode(50)};
  Rng rng(7, 0);
  const PairDataset data = build_pair_dataset(episodes, 3000, spec, rng);
  bool saw_final = false;
  for (const auto& [pair, label] : data) {
    // the final state sits at x = 0.50
    if (pair.to[0] == doctest::Approx(0.50)) saw_final = true;
  }
  CHECK(saw_final);
}

TEST_CASE("balancing yields roughly uniform labels on a long episode") {
  const BinSpec spec = make_bin_spec(50, 5);
  std::vector<Episode> episodes = {walk_episode(50)};
  Rng rng(9, 0);
  const PairDataset data = build_pair_dataset(episodes, 50000, spec, rng);
  std::map<int, std::int64_t> counts;
  for (const auto& [pair, label] : data) ++counts[label];
  REQUIRE(counts.size() == 5);
  for (const auto& [bin, c] : counts) {
    CHECK(c > 0.8 * 10000);
    CHECK(c < 1.2 * 10000);
  }
}

TEST_CASE("short episodes only produce feasible bins") {
  const BinSpec spec = make_bin_spec(50, 5);  // bounds 2 5 10 23 50
  std::vector<Episode> episodes = {walk_episode(4)};  // max gap 4 -> bins 1, 2
  Rng rng(11, 0);
  const PairDataset data = build_pair_dataset(episodes, 2000, spec, rng);
  std::map<int, std::int64_t> counts;
  for (const auto& [pair, label] : data) {
    CHECK(label <= 2);
    ++counts[label];
  }
  CHECK(counts.size() == 2);
}

TEST_CASE("empty inputs are rejected") {
  const BinSpec spec = make_bin_spec(50, 5);
  Rng rng(0, 0);
  CHECK_THROWS_AS(build_pair_dataset({}, 10, spec, rng), EmptyDatasetError);
  std::vector<Episode> episodes = {walk_episode(5)};
  CHECK(build_pair_dataset(episodes, 0, spec, rng).empty());
}

TEST_CASE("the model head width equals the bin count") {
  const BinSpec spec = make_bin_spec(50, 5);
  Rng rng(13, 0);
  const DdfModel model = DdfModel::create(2, spec, {32, 32}, rng);
  CHECK(model.net.sizes == std::vector<int>{4, 32, 32, 5});
  CHECK(model.bin_spec.upper_bounds == spec.upper_bounds);
}

TEST_CASE("predict_bin breaks ties toward the lower bin") {
  const BinSpec spec = make_bin_spec(50, 5);
  DdfModel model;
  model.bin_spec = spec;
  model.net = Mlp::zeros({4, 5});  // all logits identical
  const auto [bin, logits] = predict_bin(model, vec2(0.1, 0.1), vec2(0.9, 0.9));
  CHECK(bin == 1);
  REQUIRE(logits.size() == 5);
  CHECK(logits.isZero());
}

TEST_CASE("predict_bin follows the argmax logit") {
  const BinSpec spec = make_bin_spec(50, 5);
  DdfModel model;
  model.bin_spec = spec;
  model.net = Mlp::zeros({4, 5});
  model.net.biases[0][3] = 2.0;  // logit of bin 4
  const auto [bin, logits] = predict_bin(model, vec2(0, 0), vec2(1, 1));
  CHECK(bin == 4);
}

TEST_CASE("training learns the walk distance to usable accuracy") {
  const BinSpec spec = make_bin_spec(50, 5);
  std::vector<Episode> episodes;
  for (int i = 0; i < 20; ++i) episodes.push_back(walk_episode(50));
  Rng data_rng(17, 0);
  const PairDataset train = build_pair_dataset(episodes, 400, spec, data_rng);
  const PairDataset holdout = build_pair_dataset(episodes, 50, spec, data_rng);

  Rng model_rng(17, 1);
  DdfModel model = DdfModel::create(2, spec, {64, 64}, model_rng);
  const double before = exact_bin_accuracy(model, holdout);
  Rng train_rng(17, 2);
  const double loss = train_ddf(model, train, 30, 128, train_rng, 1e-3);
  const double after = exact_bin_accuracy(model, holdout);
  CHECK(loss < std::log(5.0));
  CHECK(after > before);
  CHECK(after > 0.85);  // 1-d walk is easy; near-perfect is expected
}

TEST_CASE("training is deterministic for equal seeds") {
  const BinSpec spec = make_bin_spec(50, 5);
  std::vector<Episode> episodes = {walk_episode(50), walk_episode(40)};
  Rng d1(19, 0), d2(19, 0);
  const PairDataset data1 = build_pair_dataset(episodes, 100, spec, d1);
  const PairDataset data2 = build_pair_dataset(episodes, 100, spec, d2);

  Rng m1(19, 1), m2(19, 1);
  DdfModel a = DdfModel::create(2, spec, {16, 16}, m1);
  DdfModel b = DdfModel::create(2, spec, {16, 16}, m2);
  Rng t1(19, 2), t2(19, 2);
  const double la = train_ddf(a, data1, 5, 32, t1);
  const double lb = train_ddf(b, data2, 5, 32, t2);
  CHECK(la == lb);
  for (std::size_t l = 0; l < a.net.layer_count(); ++l) {
    CHECK(a.net.weights[l] == b.net.weights[l]);
  }
}

TEST_CASE("train_ddf rejects an empty dataset and bad labels") {
  const BinSpec spec = make_bin_spec(50, 5);
  Rng rng(0, 0);
  DdfModel model = DdfModel::create(2, spec, {8}, rng);
  CHECK_THROWS_AS(train_ddf(model, {}, 1, 32, rng), EmptyDatasetError);
  PairDataset bad = {{DistancePair{vec2(0, 0), vec2(0, 0), 0}, 6}};
  CHECK_THROWS_AS(train_ddf(model, bad, 1, 32, rng), LabelError);
  PairDataset zero = {{DistancePair{vec2(0, 0), vec2(0, 0), 0}, 0}};
  CHECK_THROWS_AS(train_ddf(model, zero, 1, 32, rng), LabelError);
}

TEST_CASE("exact_bin_accuracy counts argmax matches") {
  const BinSpec spec = make_bin_spec(50, 5);
  DdfModel model;
  model.bin_spec = spec;
  model.net = Mlp::zeros({4, 5});
  model.net.biases[0][1] = 1.0;  // always predicts bin 2
  PairDataset data = {
      {DistancePair{vec2(0, 0), vec2(0, 0), 0}, 2},
      {DistancePair{vec2(0, 0), vec2(0, 0), 0}, 2},
      {DistancePair{vec2(0, 0), vec2(0, 0), 0}, 1},
      {DistancePair{vec2(0, 0), vec2(0, 0), 0}, 5},
  };
  CHECK(exact_bin_accuracy(model, data) == doctest::Approx(0.5));
}

TEST_CASE("retrain schedule fires every interval") {
  CHECK_FALSE(retrain_schedule_due(999, 1000, 0));
  CHECK(retrain_schedule_due(1000, 1000, 0));
  CHECK(retrain_schedule_due(2500, 1000, 0));
  CHECK_FALSE(retrain_schedule_due(2500, 1000, 2000));
  CHECK(retrain_schedule_due(3000, 1000, 2000));
}

TEST_CASE("ddf checkpoints round-trip") {
  const BinSpec spec = make_bin_spec(50, 5);
  Rng rng(23, 0);
  DdfModel model = DdfModel::create(2, spec, {16, 16}, rng);
  std::stringstream buf;
  save_ddf(buf, model);
  const DdfModel back = load_ddf(buf);
  CHECK(back.bin_spec.upper_bounds == spec.upper_bounds);
  CHECK(back.bin_spec.horizon == 50);
  const auto [b1, l1] = predict_bin(model, vec2(0.1, 0.2), vec2(0.8, 0.9));
  const auto [b2, l2] = predict_bin(back, vec2(0.1, 0.2), vec2(0.8, 0.9));
  CHECK(b1 == b2);
  CHECK((l1 - l2).norm() == 0.0);

  std::stringstream junk("not a checkpoint");
  CHECK_THROWS_AS(load_ddf(junk), IoError);
}
