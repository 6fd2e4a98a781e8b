#pragma once

#include <cstddef>
#include <vector>

#include "stshap/explanation.hpp"
#include "stshap/value_function.hpp"

namespace stshap {

// Everything the layer-1 closed form reads from the value function.
// The difference terms f({j}) - f(empty), f(N) - f(N\{j}) and
// f(N\{j}) - f(empty) are recoverable from these fields.
struct Layer1Intermediates {
  double f_empty = 0.0;
  double f_full = 0.0;
  std::vector<double> singles;    // f({i})
  std::vector<double> drop_ones;  // f(N \ {i})
  // (singles[i] - f_empty + f_full - drop_ones[i]) / 2
  std::vector<double> tilde_phis;
  double delta = 0.0;  // f_full - f_empty

  std::size_t feature_count() const { return singles.size(); }
};

Layer1Intermediates make_layer1_intermediates(double f_empty, double f_full,
                                              std::vector<double> singles,
                                              std::vector<double> drop_ones);

// One batch over the distinct layer-1 coalitions plus the empty and grand
// coalitions: 2M + 2 evaluations for M >= 3, 4 for M = 2 where {1} = N\{2}.
Layer1Intermediates layer1_intermediates(const ValueFunction& value_function);

// phi_j = tilde_j + (delta - sum_i tilde_i) / M, phi0 = f(empty).
Explanation layer1_attribution(const Layer1Intermediates& interm);
Explanation layer1_attribution(const ValueFunction& value_function);

// The same value in its symmetric form:
//   (f({j}) - f(N\{j}))/2 - sum_i (f({i}) - f(N\{i}))/(2M) + delta/M
double alt_form(const Layer1Intermediates& interm, std::size_t j);

}  // namespace stshap
