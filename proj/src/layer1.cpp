#include "stshap/layer1.hpp"

#include <stdexcept>
#include <unordered_map>

namespace stshap {

Layer1Intermediates make_layer1_intermediates(double f_empty, double f_full,
                                              std::vector<double> singles,
                                              std::vector<double> drop_ones) {
  if (singles.size() != drop_ones.size()) {
    throw std::invalid_argument("singles and drop_ones differ in length");
  }
  check_feature_count(singles.size());
  Layer1Intermediates out;
  out.f_empty = f_empty;
  out.f_full = f_full;
  out.delta = f_full - f_empty;
  out.tilde_phis.resize(singles.size());
  for (std::size_t i = 0; i < singles.size(); ++i) {
    out.tilde_phis[i] = (singles[i] - f_empty + f_full - drop_ones[i]) / 2.0;
  }
  out.singles = std::move(singles);
  out.drop_ones = std::move(drop_ones);
  return out;
}

Layer1Intermediates layer1_intermediates(const ValueFunction& value_function) {
  const std::size_t m = value_function.feature_count();
  check_feature_count(m);

  std::vector<Coalition> distinct;
  std::unordered_map<std::uint64_t, std::size_t> slot;
  auto request = [&](const Coalition& c) {
    const auto [it, inserted] = slot.emplace(c.mask(), distinct.size());
    if (inserted) distinct.push_back(c);
    return it->second;
  };
  const std::size_t empty_slot = request(Coalition::empty(m));
  const std::size_t full_slot = request(Coalition::full(m));
  std::vector<std::size_t> single_slot(m);
  std::vector<std::size_t> drop_slot(m);
  for (std::size_t i = 0; i < m; ++i) {
    single_slot[i] = request(Coalition::empty(m).with(i));
    drop_slot[i] = request(Coalition::full(m).without(i));
  }

  const std::vector<double> values = value_function.evaluate_batch(distinct);
  std::vector<double> singles(m);
  std::vector<double> drop_ones(m);
  for (std::size_t i = 0; i < m; ++i) {
    singles[i] = values[single_slot[i]];
    drop_ones[i] = values[drop_slot[i]];
  }
  return make_layer1_intermediates(values[empty_slot], values[full_slot],
                                   std::move(singles), std::move(drop_ones));
}

Explanation layer1_attribution(const Layer1Intermediates& interm) {
  const std::size_t m = interm.feature_count();
  double tilde_sum = 0.0;
  for (double t : interm.tilde_phis) tilde_sum += t;
  const double correction = (interm.delta - tilde_sum) / static_cast<double>(m);

  Explanation e;
  e.phi0 = interm.f_empty;
  e.fx = interm.f_full;
  e.strategy = Strategy::layer1;
  e.budget = layer_size(m, 1);
  e.seed = 0;
  e.phis.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    e.phis[j] = interm.tilde_phis[j] + correction;
    if (e.phis[j] != 0.0) e.support.push_back(j);
  }
  return e;
}

Explanation layer1_attribution(const ValueFunction& value_function) {
  return layer1_attribution(layer1_intermediates(value_function));
}

double alt_form(const Layer1Intermediates& interm, std::size_t j) {
  const std::size_t m = interm.feature_count();
  if (j >= m) throw std::out_of_range("feature index out of range");
  double spread = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    spread += interm.singles[i] - interm.drop_ones[i];
  }
  const double md = static_cast<double>(m);
  return (interm.singles[j] - interm.drop_ones[j]) / 2.0 - spread / (2.0 * md) +
         interm.delta / md;
}

}  // namespace stshap
