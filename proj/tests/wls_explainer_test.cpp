#include "stshap/wls_explainer.hpp"

#include <gtest/gtest.h>

#include <random>

#include "stshap/errors.hpp"
#include "test_support.hpp"

namespace stshap {
namespace {

std::vector<double> play(const ValueFunction& vf, const WeightedCoalitionSet& set) {
  return vf.evaluate_batch(set.coalitions);
}

void expect_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "i=" << i;
}

TEST(WlsExplainerTest, FullBudgetRecoversShapleyValues) {
  GameValueFunction glove(testing::glove_game());
  for (auto s : {Strategy::kernel_shap, Strategy::st_shap}) {
    const auto e = explain(glove, s, 6, 0);
    expect_near(e.phis, {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1e-12);
    EXPECT_DOUBLE_EQ(e.phi0, 0.0);
    EXPECT_DOUBLE_EQ(e.fx, 1.0);
  }
  GameValueFunction add(SyntheticGame::additive({1.0, 2.0, 3.0}));
  expect_near(explain(add, Strategy::st_shap, 6, 0).phis, {1.0, 2.0, 3.0}, 1e-12);
  GameValueFunction flat(SyntheticGame::cardinality({2.0, 2.0, 2.0, 2.0}));
  expect_near(explain(flat, Strategy::st_shap, 6, 0).phis, {0.0, 0.0, 0.0}, 1e-12);
}

TEST(WlsExplainerTest, FullBudgetMatchesShapleyOnRandomGames) {
  std::mt19937_64 rng(21);
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto game = testing::random_game(m, rng);
    GameValueFunction vf(game);
    const auto reference = testing::subset_shapley(m, testing::as_fn(game));
    const auto e = explain(vf, Strategy::st_shap, max_budget(m), 0);
    expect_near(e.phis, reference, 1e-9);
  }
}

TEST(WlsExplainerTest, AgreesWithKktOracleOnSampledSets) {
  std::mt19937_64 rng(22);
  const std::size_t m = 9;
  const auto game = testing::random_game(m, rng);
  GameValueFunction vf(game);
  const double phi0 = vf.evaluate(Coalition::empty(m));
  const double fx = vf.evaluate(Coalition::full(m));
  for (auto s : {Strategy::kernel_shap, Strategy::st_shap}) {
    for (std::uint64_t budget : {20u, 60u, 150u, 400u}) {
      const auto set = materialize(plan(s, m, budget, budget * 7));
      const auto values = play(vf, set);
      std::vector<std::uint64_t> masks;
      for (const auto& c : set.coalitions) masks.push_back(c.mask());
      const auto oracle = testing::kkt_wls(m, masks, set.weights, values, phi0, fx);
      const auto e = fit(set, values, phi0, fx);
      expect_near(e.phis, oracle, 1e-8);
      EXPECT_LT(e.local_accuracy_gap(), 1e-9);
    }
  }
}

TEST(WlsExplainerTest, WeightScaleInvariance) {
  std::mt19937_64 rng(23);
  const std::size_t m = 7;
  GameValueFunction vf(testing::random_game(m, rng));
  auto set = materialize(plan_st_shap(m, 60, 3));
  const auto values = play(vf, set);
  const double phi0 = vf.evaluate(Coalition::empty(m));
  const double fx = vf.evaluate(Coalition::full(m));
  const auto base = fit(set, values, phi0, fx);
  for (auto& w : set.weights) w *= 1234.5;
  expect_near(fit(set, values, phi0, fx).phis, base.phis, 1e-9);
}

TEST(WlsExplainerTest, DummyAndSymmetricPlayersAtFullBudget) {
  std::mt19937_64 rng(24);
  const std::size_t m = 6;
  const auto pair = testing::symmetric_pair_game(m, 1, 4, rng);
  const auto e = explain(GameValueFunction(pair), Strategy::kernel_shap, max_budget(m), 0);
  EXPECT_NEAR(e.phis[1], e.phis[4], 1e-10);

  auto table = testing::random_table(m, rng);
  for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
    if (mask & 0b100) table[mask] = table[mask & ~std::uint64_t{0b100}];
  }
  const auto d = explain(GameValueFunction(SyntheticGame::from_table(m, table)),
                         Strategy::st_shap, max_budget(m), 0);
  EXPECT_NEAR(d.phis[2], 0.0, 1e-10);
}

TEST(WlsExplainerTest, LocalAccuracyHoldsForSparseFits) {
  std::mt19937_64 rng(25);
  const std::size_t m = 10;
  GameValueFunction vf(testing::random_game(m, rng));
  for (std::size_t k = 2; k <= m; ++k) {
    const auto e = explain(vf, Strategy::st_shap, 200, 1, k);
    EXPECT_LT(e.local_accuracy_gap(), 1e-9);
    EXPECT_EQ(e.support.size(), std::min(k, m));
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::binary_search(e.support.begin(), e.support.end(), j)) EXPECT_EQ(e.phis[j], 0.0);
    }
  }
}

TEST(WlsExplainerTest, SparsifyPicksLargestMagnitudes) {
  GameValueFunction add(SyntheticGame::additive({1.0, 2.0, 3.0}));
  const auto e = explain(add, Strategy::st_shap, 6, 0, 2);
  EXPECT_EQ(e.support, (std::vector<std::size_t>{1, 2}));
  EXPECT_NEAR(e.phis[0], 0.0, 0.0);

  GameValueFunction mixed(SyntheticGame::additive({5.0, -5.0, 0.1}));
  const auto m = explain(mixed, Strategy::st_shap, 6, 0, 2);
  EXPECT_EQ(m.support, (std::vector<std::size_t>{0, 1}));
  EXPECT_LT(m.local_accuracy_gap(), 1e-9);
}

TEST(WlsExplainerTest, SparseRefitMatchesRestrictedKktOracle) {
  std::mt19937_64 rng(26);
  const std::size_t m = 8;
  GameValueFunction vf(testing::random_game(m, rng));
  const auto trace = explain_traced(vf, Strategy::kernel_shap, 100, 4, 3);
  const auto& e = trace.explanation;
  std::vector<std::uint64_t> masks;
  for (const auto& c : trace.set.coalitions) masks.push_back(c.mask());
  const auto oracle = testing::kkt_wls(m, masks, trace.set.weights, trace.values, e.phi0,
                                       e.fx, e.support);
  expect_near(e.phis, oracle, 1e-8);
}

TEST(WlsExplainerTest, DenseWhenExplanationSizeIsM) {
  std::mt19937_64 rng(27);
  GameValueFunction vf(testing::random_game(5, rng));
  const auto dense = explain(vf, Strategy::st_shap, 20, 2);
  const auto full = explain(vf, Strategy::st_shap, 20, 2, 5);
  EXPECT_EQ(dense.phis, full.phis);
  EXPECT_THROW(explain(vf, Strategy::st_shap, 20, 2, 0), std::invalid_argument);
  EXPECT_THROW(explain(vf, Strategy::st_shap, 20, 2, 6), std::invalid_argument);
}

TEST(WlsExplainerTest, RankDeficientDesignIsReported) {
  // Every row has features 0 and 1 together: their split is unidentifiable.
  WeightedCoalitionSet set;
  set.feature_count = 4;
  for (const char* s : {"1100", "1110", "1101", "0010", "0001", "0011"}) {
    set.coalitions.push_back(Coalition::from_string(s));
    set.weights.push_back(1.0);
  }
  const std::vector<double> values = {1, 2, 3, 4, 5, 6};
  SolverOptions strict;
  strict.ridge_jitter = 0.0;
  EXPECT_THROW(fit(set, values, 0.0, 1.0, strict), RankDeficientError);
  // With jitter the retry succeeds.
  const auto e = fit(set, values, 0.0, 1.0);
  EXPECT_LT(e.local_accuracy_gap(), 1e-9);
}

TEST(WlsExplainerTest, SeedsAreReproducible) {
  std::mt19937_64 rng(28);
  GameValueFunction vf(testing::random_game(9, rng));
  for (auto s : {Strategy::kernel_shap, Strategy::st_shap}) {
    EXPECT_EQ(explain(vf, s, 100, 5).phis, explain(vf, s, 100, 5).phis);
  }
}

TEST(WlsExplainerTest, CompleteLayerBudgetIsSeedIndependentForStShap) {
  std::mt19937_64 rng(29);
  GameValueFunction vf(testing::random_game(8, rng));
  const auto budget = complete_layer_budgets(8)[1].cumulative_budget;
  EXPECT_EQ(explain(vf, Strategy::st_shap, budget, 1).phis,
            explain(vf, Strategy::st_shap, budget, 2).phis);
}

}  // namespace
}  // namespace stshap
