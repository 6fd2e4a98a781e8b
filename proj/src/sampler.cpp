#include "stshap/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "stshap/random.hpp"

namespace stshap {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kernel_shap: return "kernel-shap";
    case Strategy::st_shap: return "st-shap";
    case Strategy::layer1: return "layer1";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "kernel-shap") return Strategy::kernel_shap;
  if (name == "st-shap") return Strategy::st_shap;
  if (name == "layer1") return Strategy::layer1;
  throw std::invalid_argument("unknown strategy \"" + std::string(name) +
                              "\" (expected kernel-shap, st-shap or layer1)");
}

std::string_view to_string(LayerMode mode) {
  switch (mode) {
    case LayerMode::complete: return "complete";
    case LayerMode::sampled: return "sampled";
    case LayerMode::pooled: return "pooled";
    case LayerMode::unused: return "unused";
  }
  return "?";
}

std::uint64_t SamplingPlan::complete_count() const {
  std::uint64_t total = 0;
  for (const auto& l : layers) {
    if (l.mode == LayerMode::complete) total += l.count;
  }
  return total;
}

std::uint64_t SamplingPlan::materialized_count() const {
  std::uint64_t total = pooled_count;
  for (const auto& l : layers) total += l.count;
  return total;
}

bool SamplingPlan::deterministic() const {
  return std::all_of(layers.begin(), layers.end(), [](const LayerAllocation& l) {
    return l.mode == LayerMode::complete || l.mode == LayerMode::unused;
  });
}

nlohmann::json to_json(const SamplingPlan& plan) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : plan.layers) {
    layers.push_back({{"layer", l.layer},
                      {"size", l.size},
                      {"mode", to_string(l.mode)},
                      {"count", l.count}});
  }
  return {{"M", plan.feature_count},
          {"budget", plan.budget},
          {"strategy", to_string(plan.strategy)},
          {"seed", plan.seed},
          {"pooled_count", plan.pooled_count},
          {"deterministic", plan.deterministic()},
          {"layers", std::move(layers)}};
}

void check_budget(std::size_t feature_count, std::uint64_t budget) {
  const std::uint64_t upper = max_budget(feature_count);
  if (budget < 2 || budget > upper) {
    throw std::invalid_argument("budget " + std::to_string(budget) +
                                " outside the valid range [2, " +
                                std::to_string(upper) + "] for M=" +
                                std::to_string(feature_count));
  }
}

namespace {

SamplingPlan empty_plan(Strategy strategy, std::size_t feature_count,
                        std::uint64_t budget, std::uint64_t seed) {
  check_budget(feature_count, budget);
  SamplingPlan p;
  p.feature_count = feature_count;
  p.budget = budget;
  p.strategy = strategy;
  p.seed = seed;
  for (std::size_t i = 1; i <= layer_count(feature_count); ++i) {
    p.layers.push_back({i, layer_size(feature_count, i), LayerMode::unused, 0});
  }
  return p;
}

// Relative slack on the weight condition, as in the reference implementation.
constexpr double kWeightConditionSlack = 1e-8;

}  // namespace

SamplingPlan plan_kernel_shap(std::size_t feature_count, std::uint64_t budget,
                              std::uint64_t seed) {
  SamplingPlan p = empty_plan(Strategy::kernel_shap, feature_count, budget, seed);
  std::uint64_t remaining = budget;
  double remaining_weight = 0.0;
  for (const auto& l : p.layers) remaining_weight += layer_weight(feature_count, l.layer);

  std::size_t next = 0;
  for (; next < p.layers.size() && remaining > 0; ++next) {
    auto& l = p.layers[next];
    const double share = layer_weight(feature_count, l.layer) / remaining_weight;
    const bool fits = remaining >= l.size;
    const bool worth = share * static_cast<double>(remaining) >=
                       static_cast<double>(l.size) * (1.0 - kWeightConditionSlack);
    if (!fits || !worth) break;
    l.mode = LayerMode::complete;
    l.count = l.size;
    remaining -= l.size;
    remaining_weight -= layer_weight(feature_count, l.layer);
  }
  if (remaining > 0) {
    for (std::size_t i = next; i < p.layers.size(); ++i) {
      p.layers[i].mode = LayerMode::pooled;
    }
    p.pooled_count = remaining;
  }
  return p;
}

SamplingPlan plan_st_shap(std::size_t feature_count, std::uint64_t budget,
                          std::uint64_t seed) {
  SamplingPlan p = empty_plan(Strategy::st_shap, feature_count, budget, seed);
  std::uint64_t remaining = budget;
  for (auto& l : p.layers) {
    if (remaining == 0) break;
    if (remaining >= l.size) {
      l.mode = LayerMode::complete;
      l.count = l.size;
      remaining -= l.size;
    } else {
      l.mode = LayerMode::sampled;
      l.count = remaining;
      remaining = 0;
    }
  }
  return p;
}

SamplingPlan plan(Strategy strategy, std::size_t feature_count,
                  std::uint64_t budget, std::uint64_t seed) {
  switch (strategy) {
    case Strategy::kernel_shap: return plan_kernel_shap(feature_count, budget, seed);
    case Strategy::st_shap: return plan_st_shap(feature_count, budget, seed);
    case Strategy::layer1: break;
  }
  throw std::invalid_argument("layer1 has no sampling plan");
}

namespace {

void append_complete_layer(WeightedCoalitionSet& set, std::size_t layer) {
  const std::size_t m = set.feature_count;
  const double w = kernel_weight(m, layer).value;
  for (const auto& c : enumerate_layer(m, layer)) {
    set.coalitions.push_back(c);
    set.weights.push_back(w);
  }
}

// n distinct indices in [0, population), Floyd's algorithm, returned sorted.
std::vector<std::uint64_t> sample_distinct(CounterRng& rng,
                                           std::uint64_t population,
                                           std::uint64_t n) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(n);
  for (std::uint64_t j = population - n; j < population; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

WeightedCoalitionSet materialize(const SamplingPlan& plan) {
  const std::size_t m = plan.feature_count;
  WeightedCoalitionSet set;
  set.feature_count = m;
  set.coalitions.reserve(plan.materialized_count());
  set.weights.reserve(plan.materialized_count());
  CounterRng rng(plan.seed);

  std::vector<std::size_t> pooled;
  for (const auto& l : plan.layers) {
    switch (l.mode) {
      case LayerMode::complete:
        append_complete_layer(set, l.layer);
        break;
      case LayerMode::sampled: {
        assert(l.count <= l.size);
        if (l.count > l.size) throw std::logic_error("sampled count exceeds layer");
        // Spread the layer's total kernel weight over the drawn members.
        const double w = kernel_weight(m, l.layer).value *
                         static_cast<double>(l.size) / static_cast<double>(l.count);
        for (auto index : sample_distinct(rng, l.size, l.count)) {
          set.coalitions.push_back(layer_member(m, l.layer, index));
          set.weights.push_back(w);
        }
        break;
      }
      case LayerMode::pooled:
        pooled.push_back(l.layer);
        break;
      case LayerMode::unused:
        break;
    }
  }

  if (plan.pooled_count > 0) {
    if (pooled.empty()) throw std::logic_error("pooled budget without pooled layers");
    std::vector<double> cumulative;
    double pool_weight = 0.0;
    std::uint64_t population = 0;
    for (auto layer : pooled) {
      pool_weight += layer_weight(m, layer);
      cumulative.push_back(pool_weight);
      population += layer_size(m, layer);
    }
    if (plan.pooled_count > population) {
      throw std::logic_error("pooled count exceeds the pooled population");
    }
    std::unordered_map<std::uint64_t, std::uint64_t> multiplicity;
    std::vector<Coalition> order;
    std::uint64_t draws = 0;
    while (order.size() < plan.pooled_count) {
      const double u = rng.uniform() * pool_weight;
      std::size_t k = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                      cumulative.begin();
      k = std::min(k, pooled.size() - 1);
      const std::size_t layer = pooled[k];
      const Coalition c = layer_member(m, layer, rng.below(layer_size(m, layer)));
      ++draws;
      if (multiplicity[c.mask()]++ == 0) order.push_back(c);
    }
    for (const auto& c : order) {
      set.coalitions.push_back(c);
      set.weights.push_back(pool_weight * static_cast<double>(multiplicity[c.mask()]) /
                            static_cast<double>(draws));
    }
  }
  return set;
}

WeightedCoalitionSet layer1_set(std::size_t feature_count) {
  WeightedCoalitionSet set;
  set.feature_count = feature_count;
  append_complete_layer(set, 1);
  return set;
}

}  // namespace stshap
