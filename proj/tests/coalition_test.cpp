#include "stshap/coalition.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace stshap {
namespace {

TEST(CoalitionTest, StringRoundTripAndSize) {
  const auto c = Coalition::from_string("1001");
  EXPECT_EQ(c.feature_count(), 4u);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_TRUE(c.contains(0));
  EXPECT_TRUE(c.contains(3));
  EXPECT_FALSE(c.contains(1));
  EXPECT_EQ(c.to_string(), "1001");
  EXPECT_EQ(c.complement().to_string(), "0110");
  EXPECT_EQ(c.layer(), 2u);
  EXPECT_TRUE(Coalition::empty(5).is_empty());
  EXPECT_TRUE(Coalition::full(5).is_full());
  EXPECT_EQ(Coalition::full(64).size(), 64u);
  EXPECT_THROW(Coalition::from_string("10x1"), std::invalid_argument);
  EXPECT_THROW(Coalition(3, 0b1000), std::invalid_argument);
}

TEST(CoalitionTest, LayerSizeMatchesTable) {
  EXPECT_EQ(layer_size(15, 3), 910u);
  EXPECT_EQ(layer_size(15, 7), 12870u);
  EXPECT_EQ(layer_size(4, 2), 6u);
  const std::uint64_t expected[] = {30, 210, 910, 2730, 6006, 10010, 12870};
  for (std::size_t i = 1; i <= 7; ++i) EXPECT_EQ(layer_size(15, i), expected[i - 1]);
}

TEST(CoalitionTest, InvalidLayerOrFeatureCount) {
  EXPECT_THROW(layer_size(15, 0), std::invalid_argument);
  EXPECT_THROW(layer_size(15, 8), std::invalid_argument);
  EXPECT_THROW(layer_size(1, 1), std::invalid_argument);
  EXPECT_THROW(layer_count(65), std::invalid_argument);
  EXPECT_THROW(complete_layer_budgets(1), std::invalid_argument);
}

TEST(CoalitionTest, EnumerateLayerCanonicalOrder) {
  std::vector<std::string> got;
  for (const auto& c : enumerate_layer(4, 1)) got.push_back(c.to_string());
  EXPECT_EQ(got, (std::vector<std::string>{"1000", "0111", "0100", "1011", "0010",
                                           "1101", "0001", "1110"}));

  got.clear();
  for (const auto& c : enumerate_layer(2, 1)) got.push_back(c.to_string());
  EXPECT_EQ(got, (std::vector<std::string>{"10", "01"}));

  const auto middle = enumerate_layer(4, 2);
  ASSERT_EQ(middle.size(), 6u);
  std::set<std::uint64_t> masks;
  for (const auto& c : middle) {
    EXPECT_EQ(c.size(), 2u);
    masks.insert(c.mask());
  }
  EXPECT_EQ(masks.size(), 6u);
}

// Brute force over all masks: layer i = every mask with |z| in {i, M-i}.
TEST(CoalitionTest, EnumerationMatchesBruteForceForAllSmallM) {
  for (std::size_t m = 2; m <= 12; ++m) {
    for (std::size_t i = 1; i <= m / 2; ++i) {
      std::set<std::uint64_t> brute;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        const auto s = static_cast<std::size_t>(std::popcount(mask));
        if (s == i || s == m - i) brute.insert(mask);
      }
      const auto listed = enumerate_layer(m, i);
      std::set<std::uint64_t> seen;
      for (const auto& c : listed) seen.insert(c.mask());
      EXPECT_EQ(listed.size(), seen.size()) << "duplicates at M=" << m << " i=" << i;
      EXPECT_EQ(seen, brute);
      EXPECT_EQ(listed.size(), layer_size(m, i));
    }
  }
}

TEST(CoalitionTest, LayerMemberAgreesWithEnumeration) {
  for (std::size_t m : {2u, 5u, 8u, 11u}) {
    for (std::size_t i = 1; i <= m / 2; ++i) {
      const auto listed = enumerate_layer(m, i);
      for (std::uint64_t k = 0; k < listed.size(); ++k) {
        EXPECT_EQ(layer_member(m, i, k), listed[k]);
      }
      EXPECT_THROW(layer_member(m, i, listed.size()), std::out_of_range);
    }
  }
  // Large M: unranking stays exact at the ends of the layer.
  EXPECT_EQ(layer_member(64, 32, 0).mask(), 0xFFFFFFFFull);
  EXPECT_EQ(layer_member(64, 1, 127).to_string(), std::string(63, '1') + "0");
}

TEST(CoalitionTest, EnumerationIsRepeatable) {
  EXPECT_EQ(enumerate_layer(10, 3), enumerate_layer(10, 3));
}

TEST(CoalitionTest, KernelWeightValues) {
  EXPECT_DOUBLE_EQ(kernel_weight(4, 1).value, 0.25);
  EXPECT_DOUBLE_EQ(kernel_weight(4, 2).value, 0.125);
  EXPECT_TRUE(kernel_weight(4, 0).infinite);
  EXPECT_TRUE(kernel_weight(4, 4).infinite);
  EXPECT_FALSE(kernel_weight(4, 1).infinite);
  EXPECT_THROW(kernel_weight(4, 5), std::invalid_argument);
}

TEST(CoalitionTest, KernelWeightSymmetricDecreasingAndMatchesDefinition) {
  for (std::size_t m = 2; m <= 20; ++m) {
    for (std::size_t s = 1; s < m; ++s) {
      EXPECT_DOUBLE_EQ(kernel_weight(m, s).value, kernel_weight(m, m - s).value);
      EXPECT_NEAR(kernel_weight(m, s).value, testing::kernel_by_definition(m, s),
                  1e-15 * testing::kernel_by_definition(m, s) + 1e-300);
    }
    for (std::size_t s = 1; s < m / 2; ++s) {
      EXPECT_GT(kernel_weight(m, s).value, kernel_weight(m, s + 1).value);
    }
  }
}

TEST(CoalitionTest, LayerWeightIsSizeTimesKernel) {
  for (std::size_t m = 2; m <= 20; ++m) {
    for (std::size_t i = 1; i <= m / 2; ++i) {
      const double direct = static_cast<double>(layer_size(m, i)) * kernel_weight(m, i).value;
      EXPECT_NEAR(layer_weight(m, i), direct, 1e-12 * direct);
    }
  }
}

TEST(CoalitionTest, CompleteLayerBudgets) {
  const auto b13 = complete_layer_budgets(13);
  ASSERT_EQ(b13.size(), 6u);
  EXPECT_EQ(b13[0].cumulative_budget, 26u);
  EXPECT_EQ(b13[1].cumulative_budget, 182u);
  EXPECT_EQ(b13[2].cumulative_budget, 754u);

  const auto b15 = complete_layer_budgets(15);
  EXPECT_EQ(b15[0].cumulative_budget, 30u);
  EXPECT_EQ(b15[1].cumulative_budget, 240u);
  EXPECT_EQ(b15[2].cumulative_budget, 1150u);
  EXPECT_EQ(b15[3].cumulative_budget, 3880u);
  EXPECT_EQ(b15.back().cumulative_budget, max_budget(15));

  const auto b2 = complete_layer_budgets(2);
  ASSERT_EQ(b2.size(), 1u);
  EXPECT_EQ(b2[0].layer, 1u);
  EXPECT_EQ(b2[0].cumulative_budget, 2u);
}

TEST(CoalitionTest, BinomialOverflowIsReported) {
  EXPECT_EQ(binomial(64, 32), 1832624140942590534ull);
  EXPECT_EQ(binomial(5, 7), 0u);
  EXPECT_THROW(binomial(70, 35), std::overflow_error);
}

}  // namespace
}  // namespace stshap
