#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fairdrift/core.hpp"
#include "fairdrift/metrics.hpp"
#include "oracles.hpp"

using namespace fairdrift;
using Ints = std::vector<int>;
using Reals = std::vector<double>;

TEST_CASE("statistical parity example") {
  // Group 0 predicts positive 2/4, group 1 predicts positive 3/4.
  const Ints pred{1, 1, 0, 0, 1, 1, 1, 0};
  const Ints group{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(statistical_parity_diff(pred, group) == 0.25);
}

TEST_CASE("equal opportunity and predictive equality examples") {
  // Group 0: positives predicted 3/4 (TPR .75), negatives 1/4 (FPR .25).
  // Group 1: positives predicted 2/4 (TPR .5),  negatives 2/4 (FPR .5).
  const Ints pred{1, 1, 1, 0, 1, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0};
  const Ints label{1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0};
  const Ints group{0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(equal_opportunity_diff(pred, label, group) == 0.25);
  CHECK(predictive_equality_diff(pred, label, group) == 0.25);
}

TEST_CASE("identical groups have zero gaps") {
  const Ints pred{1, 0, 1, 0};
  const Ints label{1, 0, 1, 0};
  const Ints group{0, 0, 1, 1};
  CHECK(statistical_parity_diff(pred, group) == 0.0);
  CHECK(equal_opportunity_diff(pred, label, group) == 0.0);
  CHECK(predictive_equality_diff(pred, label, group) == 0.0);
}

TEST_CASE("undefined metrics are reported") {
  CHECK_THROWS_WITH_AS(statistical_parity_diff(Ints{1, 0}, Ints{0, 0}), "undefined: empty group",
                       MetricUndefined);
  CHECK_THROWS_WITH_AS(equal_opportunity_diff(Ints{1, 0, 1}, Ints{1, 0, 0}, Ints{0, 0, 1}),
                       "undefined: no positives in group", MetricUndefined);
  CHECK_THROWS_WITH_AS(predictive_equality_diff(Ints{1, 0, 1}, Ints{0, 1, 1}, Ints{0, 0, 1}),
                       "undefined: no negatives in group", MetricUndefined);
  CHECK_THROWS_WITH_AS(auc(Reals{0.2, 0.9}, Ints{1, 1}), "AUC undefined", MetricUndefined);
  CHECK_THROWS_AS(statistical_parity_diff(Ints{1}, Ints{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(statistical_parity_diff(Ints{2, 0}, Ints{0, 1}), std::invalid_argument);
}

TEST_CASE("AUC examples") {
  CHECK(auc(Reals{0.1, 0.4, 0.35, 0.8}, Ints{0, 0, 1, 1}) == 0.75);
  CHECK(auc(Reals{0.3, 0.3, 0.3, 0.3}, Ints{0, 1, 0, 1}) == 0.5);
  CHECK(auc(Reals{0.1, 0.9}, Ints{0, 1}) == 1.0);
  CHECK(auc(Reals{0.9, 0.1}, Ints{0, 1}) == 0.0);
}

TEST_CASE("reversing the scores maps AUC to 1 - AUC") {
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> level(0, 5);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 300; ++trial) {
    Reals s, r;
    Ints y;
    for (int i = 0; i < 12; ++i) {
      const double v = level(rng) / 5.0;
      s.push_back(v);
      r.push_back(-v);
      y.push_back(coin(rng) ? 1 : 0);
    }
    if (std::count(y.begin(), y.end(), 1) % 12 == 0) continue;
    CHECK(auc(r, y) == doctest::Approx(1.0 - auc(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("snapshot metrics agree with exhaustive counting") {
  std::mt19937_64 rng(89);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_int_distribution<int> level(0, 4);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = size(rng);
    Ints pred, label, group;
    Reals scores;
    for (int i = 0; i < n; ++i) {
      pred.push_back(coin(rng));
      label.push_back(coin(rng));
      group.push_back(coin(rng));
      scores.push_back(level(rng) / 4.0);
    }
    const auto cm = oracle::confusion(pred, label, group);

    const auto sp = oracle::sp_gap(cm);
    if (sp.defined) CHECK(statistical_parity_diff(pred, group) == sp.gap);
    else CHECK_THROWS_AS(statistical_parity_diff(pred, group), MetricUndefined);

    const auto tpr = oracle::conditional_gap(cm, 1);
    if (tpr.defined) CHECK(equal_opportunity_diff(pred, label, group) == tpr.gap);
    else CHECK_THROWS_AS(equal_opportunity_diff(pred, label, group), MetricUndefined);

    const auto fpr = oracle::conditional_gap(cm, 0);
    if (fpr.defined) CHECK(predictive_equality_diff(pred, label, group) == fpr.gap);
    else CHECK_THROWS_AS(predictive_equality_diff(pred, label, group), MetricUndefined);

    const auto a = oracle::pairwise_auc(scores, label);
    if (a.defined) CHECK(std::abs(auc(scores, label) - a.gap) <= 1e-12);
    else CHECK_THROWS_AS(auc(scores, label), MetricUndefined);
  }
}

TEST_CASE("gaps are symmetric under swapping the groups") {
  std::mt19937_64 rng(97);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 300; ++trial) {
    Ints pred, label, group, swapped;
    for (int i = 0; i < 16; ++i) {
      pred.push_back(coin(rng));
      label.push_back(coin(rng));
      group.push_back(coin(rng));
      swapped.push_back(1 - group.back());
    }
    const auto a = evaluate_snapshot(Reals(pred.begin(), pred.end()), label, group);
    const auto b = evaluate_snapshot(Reals(pred.begin(), pred.end()), label, swapped);
    CHECK(a.delta_sp == b.delta_sp);
    CHECK(a.delta_tpr == b.delta_tpr);
    CHECK(a.delta_fpr == b.delta_fpr);
  }
}

TEST_CASE("evaluate_snapshot thresholds scores and keeps undefined metrics empty") {
  const Reals scores{0.7, 0.5, 0.2, 0.9};
  const Ints labels{1, 1, 1, 1};
  const Ints groups{0, 0, 1, 1};
  const auto r = evaluate_snapshot(scores, labels, groups, 0.5);
  CHECK(r.n_evaluated == 4);
  CHECK_FALSE(r.auc.has_value());
  CHECK_FALSE(r.delta_fpr.has_value());
  REQUIRE(r.delta_sp.has_value());
  CHECK(*r.delta_sp == 0.5);
  REQUIRE(r.delta_tpr.has_value());
  CHECK(*r.delta_tpr == 0.5);
}

TEST_CASE("temporal metric examples") {
  const Reals a{0.1, 0.3, 0.2};
  CHECK(max_bias(a) == 0.3);
  CHECK(temporal_stability(a) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(max_bias_difference(a) == doctest::Approx(0.2).epsilon(1e-12));

  const Reals flat{0.2, 0.2, 0.2, 0.2};
  CHECK(temporal_stability(flat) == 0.0);
  CHECK(max_bias_difference(flat) == 0.0);

  CHECK(temporal_stability(Reals{0.0, 1.0}) == 0.5);
  CHECK(max_bias_difference(Reals{0.0, 1.0, 0.0}) == 1.0);
  CHECK(max_bias(Reals{0.4}) == 0.4);

  CHECK_THROWS_AS(max_bias(Reals{}), std::invalid_argument);
  CHECK_THROWS_AS(temporal_stability(Reals{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(max_bias_difference(Reals{0.1}), std::invalid_argument);
}

TEST_CASE("temporal metric bounds") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    Reals d(2 + trial % 20);
    for (auto& v : d) v = u(rng);
    const double mb = max_bias(d), ts = temporal_stability(d), mbd = max_bias_difference(d);
    const double n = static_cast<double>(d.size());
    CHECK(ts >= 0.0);
    CHECK(mbd <= 2.0 * mb + 1e-15);
    CHECK(ts <= mbd * (n - 1.0) / n + 1e-12);
  }
}

TEST_CASE("temporal_report drops missing steps") {
  const std::vector<std::optional<double>> d{0.1, std::nullopt, 0.3, 0.2};
  const auto r = temporal_report(d);
  CHECK(r.n_steps == 3);
  CHECK(r.n_excluded == 1);
  CHECK(*r.mb == 0.3);
  CHECK(*r.ts == doctest::Approx(0.1));
  CHECK(*r.mbd == doctest::Approx(0.2));

  const std::vector<std::optional<double>> single{std::nullopt, 0.4};
  const auto s = temporal_report(single);
  CHECK(*s.mb == 0.4);
  CHECK_FALSE(s.ts.has_value());
  CHECK_FALSE(s.mbd.has_value());

  const auto none = temporal_report(std::vector<std::optional<double>>{std::nullopt});
  CHECK_FALSE(none.mb.has_value());
  CHECK(none.n_excluded == 1);
}

TEST_CASE("delta metric names round-trip") {
  for (auto m : {DeltaMetric::StatisticalParity, DeltaMetric::EqualOpportunity,
                 DeltaMetric::PredictiveEquality})
    CHECK(parse_delta_metric(to_string(m)) == m);
  CHECK_THROWS_AS(parse_delta_metric("delta_auc"), ConfigError);
}
