#include "stshap/exact.hpp"

#include <gtest/gtest.h>

#include <random>

#include "stshap/errors.hpp"
#include "test_support.hpp"

namespace stshap {
namespace {

TEST(ExactTest, KnownGames) {
  const auto glove = exact_shap(GameValueFunction(testing::glove_game()));
  EXPECT_NEAR(glove.phis[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(glove.phis[1], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(glove.phis[2], 1.0 / 6.0, 1e-15);
  EXPECT_EQ(glove.eval_count, 8u);

  const auto add = exact_shap(GameValueFunction(SyntheticGame::additive({1.0, 2.0, 3.0})));
  EXPECT_NEAR(add.phis[2], 3.0, 1e-15);

  const auto two = exact_shap(GameValueFunction(SyntheticGame::from_table(2, {0, 1, 2, 4})));
  EXPECT_DOUBLE_EQ(two.phis[0], 1.5);
  EXPECT_DOUBLE_EQ(two.phis[1], 2.5);
  EXPECT_DOUBLE_EQ(two.phi0, 0.0);
  EXPECT_DOUBLE_EQ(two.fx, 4.0);
}

TEST(ExactTest, AgreesWithPermutationOracles) {
  std::mt19937_64 rng(41);
  for (std::size_t m = 2; m <= 7; ++m) {
    const auto game = testing::random_game(m, rng);
    GameValueFunction vf(game);
    const auto subset = exact_shap(vf);
    const auto perm = exact_shap_permutation(vf);
    const auto oracle = testing::permutation_shapley(m, testing::as_fn(game));
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      EXPECT_NEAR(subset.phis[j], perm.phis[j], 1e-12);
      EXPECT_NEAR(subset.phis[j], oracle[j], 1e-12);
      total += subset.phis[j];
    }
    EXPECT_NEAR(total, subset.fx - subset.phi0, 1e-12);
  }
}

TEST(ExactTest, CapsAreEnforced) {
  GameValueFunction big(SyntheticGame::additive(std::vector<double>(21, 1.0)));
  EXPECT_THROW(exact_shap(big), OracleCapError);
  GameValueFunction nine(SyntheticGame::additive(std::vector<double>(9, 1.0)));
  EXPECT_THROW(exact_shap_permutation(nine), OracleCapError);
  EXPECT_THROW(exact_shap(nine, 8), OracleCapError);
  try {
    exact_shap(big);
  } catch (const OracleCapError& e) {
    EXPECT_NE(std::string(e.what()).find("2097152"), std::string::npos) << e.what();
  }
}

TEST(ExactTest, MemoizesEveryCoalitionOnce) {
  GameValueFunction vf(SyntheticGame::additive(std::vector<double>(13, 0.5)));
  CountingValueFunction counted(vf);
  const auto r = exact_shap(counted);
  EXPECT_EQ(counted.evaluations(), 8192u);
  EXPECT_EQ(r.eval_count, 8192u);
  for (double p : r.phis) EXPECT_NEAR(p, 0.5, 1e-12);
}

}  // namespace
}  // namespace stshap
