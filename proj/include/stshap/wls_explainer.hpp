#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stshap/explanation.hpp"
#include "stshap/sampler.hpp"
#include "stshap/value_function.hpp"

namespace stshap {

struct SolverOptions {
  // Maximum |phi0 + sum(phi) - f(x)| accepted from a fit.
  double accuracy_tolerance = 1e-9;
  // Added to the normal-equation diagonal when the first solve is singular.
  double ridge_jitter = 1e-10;
  // An LDLT pivot below this fraction of the largest pivot counts as singular.
  double pivot_tolerance = 1e-12;
};

// Constrained weighted least squares fit of g(z) = phi0 + sum_i phi_i z_i.
//
// phi0 is pinned and sum(phi) = fx - phi0 is enforced by eliminating the
// last feature, which leaves an unconstrained (M-1)-variable problem solved
// through its weighted normal equations.
Explanation fit(const WeightedCoalitionSet& set, std::span<const double> values,
                double phi0, double fx, const SolverOptions& options = {});

// Keeps the k largest |phi| of a dense fit (lower index wins ties) and refits
// with every other coefficient pinned to zero.
Explanation sparsify(const Explanation& dense, std::size_t k,
                     const WeightedCoalitionSet& set,
                     std::span<const double> values,
                     const SolverOptions& options = {});

// Everything an explanation run produced, for adherence and diagnostics.
struct ExplainTrace {
  Explanation explanation;
  WeightedCoalitionSet set;
  std::vector<double> values;
};

// plan -> materialize -> evaluate -> fit -> sparsify. For Strategy::layer1
// the closed form is used on the layer-1 coalitions and `budget`/`seed` are
// ignored. `explanation_size` of nullopt (or M) keeps the dense fit.
ExplainTrace explain_traced(const ValueFunction& value_function,
                            Strategy strategy, std::uint64_t budget,
                            std::uint64_t seed,
                            std::optional<std::size_t> explanation_size = {},
                            const SolverOptions& options = {});

Explanation explain(const ValueFunction& value_function, Strategy strategy,
                    std::uint64_t budget, std::uint64_t seed,
                    std::optional<std::size_t> explanation_size = {},
                    const SolverOptions& options = {});

}  // namespace stshap
