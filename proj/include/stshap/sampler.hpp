#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "stshap/coalition.hpp"

namespace stshap {

enum class Strategy { kernel_shap, st_shap, layer1 };

std::string_view to_string(Strategy strategy);
// Accepts "kernel-shap", "st-shap", "layer1".
Strategy parse_strategy(std::string_view name);

// How a layer takes part in a plan.
//  complete: every coalition of the layer is materialized.
//  sampled:  `count` coalitions drawn uniformly without replacement from this
//            layer only (ST-SHAP).
//  pooled:   part of the Kernel SHAP random phase, drawn jointly with the
//            other pooled layers; the per-layer count is only known after
//            materialization.
//  unused:   no coalitions.
enum class LayerMode { complete, sampled, pooled, unused };

std::string_view to_string(LayerMode mode);

struct LayerAllocation {
  std::size_t layer = 0;
  std::uint64_t size = 0;
  LayerMode mode = LayerMode::unused;
  std::uint64_t count = 0;
};

struct SamplingPlan {
  std::size_t feature_count = 0;
  std::uint64_t budget = 0;
  Strategy strategy = Strategy::st_shap;
  std::uint64_t seed = 0;
  std::vector<LayerAllocation> layers;
  // Kernel SHAP only: coalitions drawn jointly from the pooled layers.
  std::uint64_t pooled_count = 0;

  std::uint64_t complete_count() const;
  std::uint64_t materialized_count() const;
  // True when the plan contains no randomness.
  bool deterministic() const;
};

nlohmann::json to_json(const SamplingPlan& plan);

// Throws std::invalid_argument unless 2 <= budget <= 2^M - 2.
void check_budget(std::size_t feature_count, std::uint64_t budget);

// Original Kernel SHAP: fill layer i iff the remaining budget covers it and
// the layer's share of the remaining kernel weight times the remaining budget
// covers it too; on the first failure the rest of the budget is pooled over
// all remaining layers.
SamplingPlan plan_kernel_shap(std::size_t feature_count, std::uint64_t budget,
                              std::uint64_t seed);

// ST-SHAP: fill layers while they fit; the first layer that does not fit
// receives the remaining budget as a within-layer sample.
SamplingPlan plan_st_shap(std::size_t feature_count, std::uint64_t budget,
                          std::uint64_t seed);

SamplingPlan plan(Strategy strategy, std::size_t feature_count,
                  std::uint64_t budget, std::uint64_t seed);

struct WeightedCoalitionSet {
  std::size_t feature_count = 0;
  std::vector<Coalition> coalitions;
  std::vector<double> weights;

  std::size_t size() const { return coalitions.size(); }
};

// Materializes a plan into distinct coalitions with positive regression
// weights. Deterministic given the plan's seed.
WeightedCoalitionSet materialize(const SamplingPlan& plan);

// Every coalition of layer 1 with its kernel weight.
WeightedCoalitionSet layer1_set(std::size_t feature_count);

}  // namespace stshap
