#include "stshap/exact.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "stshap/errors.hpp"

namespace stshap {

namespace {

constexpr std::size_t kChunk = 4096;

void check_cap(std::size_t m, std::size_t cap) {
  check_feature_count(m);
  if (m > cap) {
    throw OracleCapError("exact Shapley values for M=" + std::to_string(m) +
                         " need 2^" + std::to_string(m) + " = " +
                         (m < 64 ? std::to_string(std::uint64_t{1} << m) : "2^64") +
                         " evaluations; the cap is M <= " + std::to_string(cap));
  }
}

// Value of every mask, indexed by mask.
std::vector<double> all_values(const ValueFunction& vf) {
  const std::size_t m = vf.feature_count();
  const std::uint64_t total = std::uint64_t{1} << m;
  std::vector<double> out(total);
  std::vector<Coalition> chunk;
  chunk.reserve(kChunk);
  for (std::uint64_t start = 0; start < total; start += kChunk) {
    chunk.clear();
    const std::uint64_t end = std::min<std::uint64_t>(total, start + kChunk);
    for (std::uint64_t mask = start; mask < end; ++mask) chunk.emplace_back(m, mask);
    const auto values = vf.evaluate_batch(chunk);
    std::copy(values.begin(), values.end(), out.begin() + start);
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const ExactValues& v) {
  return {{"phi0", v.phi0}, {"fx", v.fx}, {"phis", v.phis}, {"eval_count", v.eval_count}};
}

ExactValues exact_shap(const ValueFunction& value_function,
                       std::size_t max_features) {
  const std::size_t m = value_function.feature_count();
  check_cap(m, max_features);
  const std::vector<double> v = all_values(value_function);

  // |S|! (M-|S|-1)! / M! = 1 / (M * C(M-1, |S|)) for S not containing i.
  std::vector<double> weight(m);
  for (std::size_t s = 0; s < m; ++s) {
    weight[s] = 1.0 / static_cast<double>(m * binomial(m - 1, s));
  }

  ExactValues out;
  out.eval_count = v.size();
  out.phi0 = v.front();
  out.fx = v.back();
  out.phis.assign(m, 0.0);
  for (std::uint64_t mask = 0; mask < v.size(); ++mask) {
    const std::size_t s = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      out.phis[i] += weight[s] * (v[mask | bit] - v[mask]);
    }
  }
  return out;
}

ExactValues exact_shap_permutation(const ValueFunction& value_function,
                                   std::size_t max_features) {
  const std::size_t m = value_function.feature_count();
  check_cap(m, std::min(max_features, kPermutationCap));
  const std::vector<double> v = all_values(value_function);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sums(m, 0.0);
  std::uint64_t orderings = 0;
  do {
    std::uint64_t mask = 0;
    for (std::size_t player : order) {
      const std::uint64_t next = mask | (std::uint64_t{1} << player);
      sums[player] += v[next] - v[mask];
      mask = next;
    }
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));

  ExactValues out;
  out.eval_count = v.size();
  out.phi0 = v.front();
  out.fx = v.back();
  out.phis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.phis[i] = sums[i] / static_cast<double>(orderings);
  }
  return out;
}

}  // namespace stshap
