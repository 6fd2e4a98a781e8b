#include "stshap/wls_explainer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stshap/errors.hpp"
#include "stshap/layer1.hpp"

namespace stshap {

namespace {

void check_inputs(const WeightedCoalitionSet& set,
                  std::span<const double> values) {
  if (set.coalitions.size() != set.weights.size() ||
      set.coalitions.size() != values.size()) {
    throw std::invalid_argument("coalitions, weights and values must align");
  }
  for (double w : set.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("regression weights must be positive and finite");
    }
  }
}

std::string describe(const WeightedCoalitionSet& set) {
  std::vector<std::size_t> per_layer(set.feature_count / 2 + 1, 0);
  for (const auto& c : set.coalitions) ++per_layer[c.layer()];
  std::ostringstream out;
  out << "M=" << set.feature_count << ", " << set.size() << " coalitions (per layer:";
  for (std::size_t i = 1; i < per_layer.size(); ++i) out << ' ' << i << ':' << per_layer[i];
  out << ')';
  return out.str();
}

bool usable(const Eigen::LDLT<Eigen::MatrixXd>& ldlt, double pivot_tolerance) {
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double largest = d.maxCoeff();
  return largest > 0.0 && d.minCoeff() > pivot_tolerance * largest;
}

// Solves for the coefficients of `active`; all other features stay at zero.
std::vector<double> solve_constrained(const WeightedCoalitionSet& set,
                                      std::span<const double> values,
                                      double phi0, double fx,
                                      std::span<const std::size_t> active,
                                      const SolverOptions& options) {
  const std::size_t m = set.feature_count;
  const double total = fx - phi0;
  std::vector<double> phis(m, 0.0);
  if (active.size() == 1) {
    phis[active.front()] = total;
    return phis;
  }

  const std::size_t last = active.back();
  const auto free = active.first(active.size() - 1);
  const Eigen::Index k = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd row(k);
  for (std::size_t r = 0; r < set.size(); ++r) {
    const Coalition& z = set.coalitions[r];
    const double z_last = z.contains(last) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      row[j] = (z.contains(free[j]) ? 1.0 : 0.0) - z_last;
    }
    const double target = values[r] - phi0 - z_last * total;
    const double w = set.weights[r];
    normal.selfadjointView<Eigen::Lower>().rankUpdate(row, w);
    rhs.noalias() += w * target * row;
  }
  normal.triangularView<Eigen::StrictlyUpper>() = normal.transpose();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (!usable(ldlt, options.pivot_tolerance)) {
    normal.diagonal().array() += options.ridge_jitter;
    ldlt.compute(normal);
    if (options.ridge_jitter <= 0.0 || !usable(ldlt, options.pivot_tolerance)) {
      throw RankDeficientError(
          "normal equations are rank deficient for " + describe(set) +
          "; increase the budget or complete more layers");
    }
  }
  const Eigen::VectorXd beta = ldlt.solve(rhs);
  double assigned = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    phis[free[j]] = beta[j];
    assigned += beta[j];
  }
  phis[last] = total - assigned;
  return phis;
}

Explanation finish(std::vector<double> phis, std::vector<std::size_t> support,
                   double phi0, double fx, const SolverOptions& options) {
  Explanation e;
  e.phi0 = phi0;
  e.fx = fx;
  e.phis = std::move(phis);
  e.support = std::move(support);
  if (!(e.local_accuracy_gap() < options.accuracy_tolerance)) {
    throw std::runtime_error("fit violates local accuracy (gap " +
                             std::to_string(e.local_accuracy_gap()) + ")");
  }
  return e;
}

}  // namespace

Explanation fit(const WeightedCoalitionSet& set, std::span<const double> values,
                double phi0, double fx, const SolverOptions& options) {
  check_inputs(set, values);
  check_feature_count(set.feature_count);
  std::vector<std::size_t> all(set.feature_count);
  std::iota(all.begin(), all.end(), 0);
  auto phis = solve_constrained(set, values, phi0, fx, all, options);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (phis[i] != 0.0) support.push_back(i);
  }
  return finish(std::move(phis), std::move(support), phi0, fx, options);
}

Explanation sparsify(const Explanation& dense, std::size_t k,
                     const WeightedCoalitionSet& set,
                     std::span<const double> values,
                     const SolverOptions& options) {
  const std::size_t m = dense.phis.size();
  if (k < 1 || k > m) {
    throw std::invalid_argument("explanation size must be in [1, M]");
  }
  if (k == m) return dense;
  check_inputs(set, values);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(dense.phis[a]) > std::abs(dense.phis[b]);
  });
  std::vector<std::size_t> selected(order.begin(), order.begin() + k);
  std::sort(selected.begin(), selected.end());

  auto phis = solve_constrained(set, values, dense.phi0, dense.fx, selected, options);
  Explanation e = finish(std::move(phis), selected, dense.phi0, dense.fx, options);
  e.strategy = dense.strategy;
  e.budget = dense.budget;
  e.seed = dense.seed;
  return e;
}

ExplainTrace explain_traced(const ValueFunction& value_function,
                            Strategy strategy, std::uint64_t budget,
                            std::uint64_t seed,
                            std::optional<std::size_t> explanation_size,
                            const SolverOptions& options) {
  const std::size_t m = value_function.feature_count();
  check_feature_count(m);
  if (explanation_size && (*explanation_size < 1 || *explanation_size > m)) {
    throw std::invalid_argument("explanation size must be in [1, M]");
  }

  ExplainTrace trace;
  if (strategy == Strategy::layer1) {
    const Layer1Intermediates interm = layer1_intermediates(value_function);
    trace.explanation = layer1_attribution(interm);
    trace.set = layer1_set(m);
    trace.values.reserve(trace.set.size());
    for (const auto& c : trace.set.coalitions) {
      const std::size_t i = c.size() == 1 ? c.mask() : c.complement().mask();
      const std::size_t feature = static_cast<std::size_t>(std::countr_zero(i));
      trace.values.push_back(c.size() == 1 ? interm.singles[feature]
                                           : interm.drop_ones[feature]);
    }
  } else {
    const SamplingPlan p = plan(strategy, m, budget, seed);
    trace.set = materialize(p);
    std::vector<Coalition> batch = trace.set.coalitions;
    batch.push_back(Coalition::empty(m));
    batch.push_back(Coalition::full(m));
    std::vector<double> values = value_function.evaluate_batch(batch);
    const double fx = values.back();
    values.pop_back();
    const double phi0 = values.back();
    values.pop_back();
    trace.values = std::move(values);
    trace.explanation = fit(trace.set, trace.values, phi0, fx, options);
    trace.explanation.strategy = strategy;
    trace.explanation.budget = budget;
    trace.explanation.seed = seed;
  }

  if (explanation_size && *explanation_size < m) {
    trace.explanation = sparsify(trace.explanation, *explanation_size, trace.set,
                                 trace.values, options);
  }
  return trace;
}

Explanation explain(const ValueFunction& value_function, Strategy strategy,
                    std::uint64_t budget, std::uint64_t seed,
                    std::optional<std::size_t> explanation_size,
                    const SolverOptions& options) {
  return explain_traced(value_function, strategy, budget, seed, explanation_size,
                        options)
      .explanation;
}

}  // namespace stshap
