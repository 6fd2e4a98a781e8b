#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "stshap/value_function.hpp"

namespace stshap {

inline constexpr std::size_t kDefaultExactCap = 20;
inline constexpr std::size_t kPermutationCap = 8;

struct ExactValues {
  double phi0 = 0.0;  // f(empty)
  double fx = 0.0;    // f(N)
  std::vector<double> phis;
  std::uint64_t eval_count = 0;
};

nlohmann::json to_json(const ExactValues& v);

// Exact Shapley values from the subset formula. Every one of the 2^M
// coalitions is evaluated once and memoized before the attribution loop.
// Throws OracleCapError when M exceeds `max_features`.
ExactValues exact_shap(const ValueFunction& value_function,
                       std::size_t max_features = kDefaultExactCap);

// Independent oracle: average marginal contribution over all M! orderings.
ExactValues exact_shap_permutation(const ValueFunction& value_function,
                                   std::size_t max_features = kPermutationCap);

}  // namespace stshap
