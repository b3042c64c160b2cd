#include <catch2/catch.hpp>

#include "kitchen/metrics.hpp"
#include "kitchen/rng.hpp"

using namespace kitchen;

TEST_CASE("average performance is the plain mean of final scores") {
  REQUIRE(average_performance({1.0, 0.5, 0.0}) == Approx(0.5));
  REQUIRE(average_performance({1.0, 1.0, 1.0, 1.0}) == Approx(1.0));
  REQUIRE_THROWS_AS(average_performance({}), MetricError);
}

TEST_CASE("forgetting averages the drop on all but the last task") {
  REQUIRE(forgetting({1.0, 1.0, 1.0}, {0.2, 0.6, 1.0}) == Approx(0.6));
  REQUIRE(forgetting({0.7, 0.9}, {0.7, 0.9}) == Approx(0.0));
  REQUIRE_THROWS_AS(forgetting({1.0}, {1.0}), MetricError);
  REQUIRE_THROWS_AS(forgetting({1.0, 1.0}, {1.0}), MetricError);
}

TEST_CASE("plasticity averages the training diagonal") {
  REQUIRE(plasticity({1.0, 1.2, 0.8}) == Approx(1.0));
  REQUIRE(plasticity({0.42}) == Approx(0.42));
}

TEST_CASE("uniform scores collapse the three metrics") {
  const std::vector<double> s(5, 0.7);
  REQUIRE(average_performance(s) == Approx(0.7));
  REQUIRE(plasticity(s) == Approx(0.7));
  REQUIRE(forgetting(s, s) == Approx(0.0));
}

TEST_CASE("A and P are invariant to consistent task permutations") {
  const std::vector<double> diag{1.0, 0.4, 0.9, 0.3};
  const std::vector<double> fin{0.5, 0.2, 0.8, 0.3};
  const std::vector<double> diag_p{0.3, 0.9, 1.0, 0.4};
  const std::vector<double> fin_p{0.3, 0.8, 0.5, 0.2};
  REQUIRE(average_performance(fin) == Approx(average_performance(fin_p)));
  REQUIRE(plasticity(diag) == Approx(plasticity(diag_p)));
}

TEST_CASE("identical repetitions give zero loss and unit ratios") {
  std::vector<RepetitionTrace> traces;
  for (int j = 0; j < 4; ++j) {
    RepetitionTrace t;
    t.repetition = j;
    for (int i = 0; i < 200; ++i)
      t.rewards.push_back(0.3 + 0.001 * i + 0.05 * ((i * 7) % 13));
    traces.push_back(t);
  }
  const auto out = plasticity_degradation(traces);
  for (const RepetitionMetrics& m : out) {
    REQUIRE(m.auc_loss == Approx(0.0).margin(1e-12));
    REQUIRE(m.fpr == Approx(1.0).margin(1e-12));
    REQUIRE(m.rauc == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("a uniformly halved repetition halves all three ratios") {
  RepetitionTrace base{0, std::vector<double>(150, 2.0)};
  RepetitionTrace half{1, std::vector<double>(150, 1.0)};
  const auto out = plasticity_degradation({base, half});
  REQUIRE(out[1].rauc == Approx(0.5));
  REQUIRE(out[1].fpr == Approx(0.5));
  REQUIRE(out[1].auc_loss == Approx(0.5));
}

TEST_CASE("hand-computed ramp fixture") {
  // Baseline ramp 0,1,2,...,9; repetition has double the reward. With
  // sigma=0 the smoothing is the identity, so every quantity is exact.
  RepetitionTrace base{0, {}};
  RepetitionTrace twice{1, {}};
  for (int i = 0; i < 10; ++i) {
    base.rewards.push_back(i);
    twice.rewards.push_back(2.0 * i);
  }
  const auto out = plasticity_degradation({base, twice}, 0.0);
  REQUIRE(out[1].rauc == Approx(2.0));
  REQUIRE(out[1].fpr == Approx(2.0));
  REQUIRE(out[1].auc_loss == Approx(-1.0));

  // Cumulative average of 0..9 is i/2; trapezoid over 10 samples = 20.25.
  // (Checked against the closed form sum_{i<9} (i/2 + (i+1)/2)/2.)
  RepetitionTrace same = base;
  same.repetition = 2;
  const auto out2 = plasticity_degradation({base, same}, 0.0);
  REQUIRE(out2[1].auc_loss == Approx(0.0).margin(1e-12));
}

TEST_CASE("ratio metrics are invariant to positive rescaling") {
  Rng rng(99);
  std::vector<RepetitionTrace> traces;
  for (int j = 0; j < 3; ++j) {
    RepetitionTrace t{j, {}};
    for (int i = 0; i < 120; ++i) t.rewards.push_back(std::abs(rng.gaussian()) + 0.1);
    traces.push_back(t);
  }
  const auto ref = plasticity_degradation(traces);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = std::exp(3.0 * rng.gaussian());
    std::vector<RepetitionTrace> scaled = traces;
    for (auto& t : scaled)
      for (double& r : t.rewards) r *= c;
    const auto out = plasticity_degradation(scaled);
    for (std::size_t j = 0; j < out.size(); ++j) {
      REQUIRE(out[j].auc_loss == Approx(ref[j].auc_loss).margin(1e-9));
      REQUIRE(out[j].fpr == Approx(ref[j].fpr).margin(1e-9));
      REQUIRE(out[j].rauc == Approx(ref[j].rauc).margin(1e-9));
    }
  }
}

TEST_CASE("degenerate repetition inputs are rejected") {
  REQUIRE_THROWS_AS(plasticity_degradation({RepetitionTrace{0, {1, 2, 3}}}),
                    MetricError);
  REQUIRE_THROWS_AS(
      plasticity_degradation({RepetitionTrace{0, {1, 2}}, RepetitionTrace{1, {1}}}),
      MetricError);
  // Zero baseline.
  REQUIRE_THROWS_AS(
      plasticity_degradation({RepetitionTrace{0, std::vector<double>(50, 0.0)},
                              RepetitionTrace{1, std::vector<double>(50, 1.0)}}),
      MetricError);
}

TEST_CASE("sequence-level aggregation averages repetitions past the baseline") {
  std::vector<std::vector<RepetitionMetrics>> per_task;
  per_task.push_back({{0, 0.0, 1.0, 1.0}, {1, 0.2, 0.9, 0.8}, {2, 0.4, 0.7, 0.6}});
  per_task.push_back({{0, 0.0, 1.0, 1.0}, {1, 0.0, 1.1, 1.0}, {2, 0.2, 0.9, 0.8}});
  const PlasticitySummary s = summarize_plasticity(per_task);
  REQUIRE(s.count == 4);
  REQUIRE(s.auc_loss == Approx((0.2 + 0.4 + 0.0 + 0.2) / 4));
  REQUIRE(s.fpr == Approx((0.9 + 0.7 + 1.1 + 0.9) / 4));
  REQUIRE(s.rauc == Approx((0.8 + 0.6 + 1.0 + 0.8) / 4));
}
