#include "stshap/sampler.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <unordered_set>

namespace stshap {
namespace {

std::vector<std::uint64_t> counts(const SamplingPlan& p) {
  std::vector<std::uint64_t> out;
  for (const auto& l : p.layers) out.push_back(l.count);
  return out;
}

TEST(SamplerTest, StShapTableAllocation) {
  const auto p = plan_st_shap(15, 1200, 7);
  EXPECT_EQ(counts(p), (std::vector<std::uint64_t>{30, 210, 910, 50, 0, 0, 0}));
  EXPECT_EQ(p.layers[3].mode, LayerMode::sampled);
  EXPECT_EQ(p.materialized_count(), 1200u);
  EXPECT_FALSE(p.deterministic());
}

TEST(SamplerTest, KernelShapTableAllocation) {
  const auto p = plan_kernel_shap(15, 1200, 7);
  EXPECT_EQ(p.layers[0].mode, LayerMode::complete);
  EXPECT_EQ(p.layers[1].mode, LayerMode::complete);
  EXPECT_EQ(p.layers[0].count, 30u);
  EXPECT_EQ(p.layers[1].count, 210u);
  for (std::size_t i = 2; i < 7; ++i) EXPECT_EQ(p.layers[i].mode, LayerMode::pooled);
  EXPECT_EQ(p.pooled_count, 960u);
  EXPECT_EQ(p.materialized_count(), 1200u);
}

TEST(SamplerTest, CompleteLayerBudgetsAreDeterministicForStShap) {
  EXPECT_TRUE(plan_st_shap(15, 240, 0).deterministic());
  EXPECT_EQ(counts(plan_st_shap(15, 30, 0)),
            (std::vector<std::uint64_t>{30, 0, 0, 0, 0, 0, 0}));
  const auto p = plan_st_shap(13, 754, 0);
  EXPECT_TRUE(p.deterministic());
  EXPECT_EQ(p.complete_count(), 754u);
}

// The weight condition stops Kernel SHAP early at these budgets: layer 2 at
// (15, 240) has share 0.2646 of the remaining weight, 0.2646 * 210 < 210;
// layer 3 at (13, 754) has 0.3033 * 572 < 572.
TEST(SamplerTest, KernelShapWeightConditionAtCompleteLayerBudgets) {
  const auto p15 = plan_kernel_shap(15, 240, 0);
  EXPECT_EQ(p15.layers[0].mode, LayerMode::complete);
  EXPECT_EQ(p15.layers[1].mode, LayerMode::pooled);
  EXPECT_EQ(p15.pooled_count, 210u);

  const auto p13 = plan_kernel_shap(13, 754, 0);
  EXPECT_EQ(p13.layers[0].mode, LayerMode::complete);
  EXPECT_EQ(p13.layers[1].mode, LayerMode::complete);
  EXPECT_EQ(p13.layers[2].mode, LayerMode::pooled);
  EXPECT_EQ(p13.pooled_count, 572u);
}

TEST(SamplerTest, FullBudgetCompletesEverything) {
  for (std::size_t m = 2; m <= 14; ++m) {
    for (auto s : {Strategy::kernel_shap, Strategy::st_shap}) {
      const auto p = plan(s, m, max_budget(m), 3);
      EXPECT_TRUE(p.deterministic()) << "M=" << m;
      EXPECT_EQ(p.complete_count(), max_budget(m));
    }
  }
}

TEST(SamplerTest, BudgetValidation) {
  EXPECT_THROW(plan_st_shap(4, 1, 0), std::invalid_argument);
  EXPECT_THROW(plan_st_shap(4, 15, 0), std::invalid_argument);
  EXPECT_THROW(plan_kernel_shap(4, 0, 0), std::invalid_argument);
  EXPECT_NO_THROW(plan_kernel_shap(4, 14, 0));
  EXPECT_THROW(plan(Strategy::layer1, 4, 8, 0), std::invalid_argument);
}

TEST(SamplerTest, PlansAgreeWhileWeightConditionHolds) {
  // Budgets inside layer 1 or layer 2 before condition 2 can fire.
  for (std::uint64_t b = 2; b <= 30; ++b) {
    const auto ks = plan_kernel_shap(15, b, 0);
    const auto st = plan_st_shap(15, b, 0);
    if (ks.pooled_count == 0 && st.deterministic()) {
      EXPECT_EQ(counts(ks), counts(st));
    }
  }
  // A layer that would take the whole remaining budget needs share >= 1.
  EXPECT_EQ(plan_kernel_shap(15, 30, 0).pooled_count, 30u);
}

TEST(SamplerTest, PlanInvariantsOverManyBudgets) {
  for (std::size_t m : {4u, 7u, 10u}) {
    std::size_t previous_complete = 0;
    for (std::uint64_t b = 2; b <= max_budget(m); ++b) {
      const auto st = plan_st_shap(m, b, 0);
      EXPECT_EQ(st.materialized_count(), b);
      std::size_t sampled = 0;
      std::size_t complete = 0;
      bool after_sampled = false;
      for (const auto& l : st.layers) {
        if (after_sampled) EXPECT_EQ(l.count, 0u);
        if (l.mode == LayerMode::sampled) {
          ++sampled;
          after_sampled = true;
        }
        if (l.mode == LayerMode::complete) {
          EXPECT_FALSE(after_sampled);
          ++complete;
        }
      }
      EXPECT_LE(sampled, 1u);
      EXPECT_GE(complete, previous_complete);
      previous_complete = complete;

      const auto ks = plan_kernel_shap(m, b, 0);
      EXPECT_EQ(ks.materialized_count(), b);
      bool pooled_seen = false;
      for (const auto& l : ks.layers) {
        if (l.mode == LayerMode::pooled) pooled_seen = true;
        if (pooled_seen) EXPECT_NE(l.mode, LayerMode::complete);
      }
    }
  }
}

void expect_well_formed(const WeightedCoalitionSet& set, std::uint64_t budget) {
  ASSERT_EQ(set.size(), budget);
  ASSERT_EQ(set.weights.size(), budget);
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& c = set.coalitions[i];
    EXPECT_GT(c.size(), 0u);
    EXPECT_LT(c.size(), set.feature_count);
    EXPECT_TRUE(seen.insert(c.mask()).second) << "duplicate " << c.to_string();
    EXPECT_GT(set.weights[i], 0.0);
    EXPECT_TRUE(std::isfinite(set.weights[i]));
  }
}

TEST(SamplerTest, MaterializeCompleteLayersUsesKernelWeights) {
  const auto set = materialize(plan_st_shap(6, 12 + 30, 11));
  expect_well_formed(set, 42);
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(set.weights[i], kernel_weight(6, set.coalitions[i].size()).value);
  }
}

TEST(SamplerTest, StShapSeedsOnlyChangeTheSampledLayer) {
  const auto a = materialize(plan_st_shap(15, 1200, 1));
  const auto b = materialize(plan_st_shap(15, 1200, 2));
  expect_well_formed(a, 1200);
  expect_well_formed(b, 1200);
  for (std::size_t i = 0; i < 1150; ++i) EXPECT_EQ(a.coalitions[i], b.coalitions[i]);
  std::set<std::uint64_t> tail_a, tail_b;
  for (std::size_t i = 1150; i < 1200; ++i) {
    EXPECT_EQ(a.coalitions[i].layer(), 4u);
    EXPECT_EQ(b.coalitions[i].layer(), 4u);
    tail_a.insert(a.coalitions[i].mask());
    tail_b.insert(b.coalitions[i].mask());
  }
  EXPECT_NE(tail_a, tail_b);
}

TEST(SamplerTest, StShapSampledLayerPreservesTotalWeight) {
  const auto set = materialize(plan_st_shap(15, 1200, 5));
  const double total = std::accumulate(set.weights.begin(), set.weights.end(), 0.0);
  double expected = 0.0;
  for (std::size_t i = 1; i <= 4; ++i) {
    expected += static_cast<double>(layer_size(15, i)) * kernel_weight(15, i).value;
  }
  EXPECT_NEAR(total, expected, 1e-12 * expected);
}

TEST(SamplerTest, KernelShapPooledPhaseMergesAndScales) {
  const auto p = plan_kernel_shap(15, 1200, 9);
  const auto set = materialize(p);
  expect_well_formed(set, 1200);
  double pooled_weight = 0.0;
  double pooled_expected = 0.0;
  for (std::size_t i = 3; i <= 7; ++i) pooled_expected += layer_weight(15, i);
  for (std::size_t i = 240; i < set.size(); ++i) {
    EXPECT_GE(set.coalitions[i].layer(), 3u);
    pooled_weight += set.weights[i];
  }
  EXPECT_NEAR(pooled_weight, pooled_expected, 1e-12);
  // Complete part is seed independent and carries exact kernel weights.
  for (std::size_t i = 0; i < 240; ++i) {
    EXPECT_EQ(set.weights[i], kernel_weight(15, set.coalitions[i].size()).value);
  }
}

TEST(SamplerTest, MaterializeIsDeterministicGivenSeed) {
  for (auto s : {Strategy::kernel_shap, Strategy::st_shap}) {
    const auto a = materialize(plan(s, 12, 500, 42));
    const auto b = materialize(plan(s, 12, 500, 42));
    EXPECT_EQ(a.coalitions, b.coalitions);
    EXPECT_EQ(a.weights, b.weights);
  }
}

TEST(SamplerTest, CompleteLayerMaterializationIgnoresSeed) {
  for (const auto& cb : complete_layer_budgets(10)) {
    const auto a = materialize(plan_st_shap(10, cb.cumulative_budget, 1));
    const auto b = materialize(plan_st_shap(10, cb.cumulative_budget, 99));
    EXPECT_EQ(a.coalitions, b.coalitions);
    EXPECT_EQ(a.weights, b.weights);
  }
}

TEST(SamplerTest, NearFullKernelShapBudgetTerminates) {
  const auto set = materialize(plan_kernel_shap(10, max_budget(10) - 1, 3));
  expect_well_formed(set, max_budget(10) - 1);
}

TEST(SamplerTest, PlanJsonCarriesAllocation) {
  const auto j = to_json(plan_st_shap(15, 1200, 3));
  EXPECT_EQ(j["budget"], 1200);
  EXPECT_EQ(j["layers"][3]["mode"], "sampled");
  EXPECT_EQ(j["layers"][3]["count"], 50);
  EXPECT_EQ(j["strategy"], "st-shap");
}

}  // namespace
}  // namespace stshap
