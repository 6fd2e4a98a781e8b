#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "stshap/sampler.hpp"

namespace stshap {

// Intercept plus one attribution per feature, with the run that produced it.
struct Explanation {
  double phi0 = 0.0;
  std::vector<double> phis;
  // Features allowed a non-zero coefficient, ascending.
  std::vector<std::size_t> support;
  Strategy strategy = Strategy::st_shap;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  // f(x), the model output on the explained instance.
  double fx = 0.0;

  // |phi0 + sum(phis) - fx|
  double local_accuracy_gap() const;
};

// {phi0, phis[], support[], strategy, budget, seed, fx}
nlohmann::json to_json(const Explanation& e);
Explanation explanation_from_json(const nlohmann::json& j);

}  // namespace stshap
