#include "stshap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace stshap {

double jaccard_n(std::span<const FeatureSet> sets) {
  if (sets.size() < 2) throw std::invalid_argument("jaccard needs at least two sets");
  for (const auto& s : sets) {
    if (s.empty()) throw std::invalid_argument("jaccard sets must be non-empty");
    if (!std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw std::invalid_argument("feature sets must be sorted and duplicate-free");
    }
  }
  FeatureSet inter = sets.front();
  FeatureSet uni = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) {
    FeatureSet next_inter;
    FeatureSet next_uni;
    std::set_intersection(inter.begin(), inter.end(), sets[i].begin(),
                          sets[i].end(), std::back_inserter(next_inter));
    std::set_union(uni.begin(), uni.end(), sets[i].begin(), sets[i].end(),
                   std::back_inserter(next_uni));
    inter = std::move(next_inter);
    uni = std::move(next_uni);
  }
  if (uni.empty()) throw std::invalid_argument("jaccard of empty union is undefined");
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

namespace {

int sign(double x) { return (x > 0) - (x < 0); }

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("metric needs two vectors of equal length >= 2");
  }
}

}  // namespace

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  long long concordant_minus_discordant = 0;
  long long pairs_a = 0;  // pairs not tied in a
  long long pairs_b = 0;  // pairs not tied in b
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const int sa = sign(a[i] - a[j]);
      const int sb = sign(b[i] - b[j]);
      concordant_minus_discordant += sa * sb;
      pairs_a += sa != 0;
      pairs_b += sb != 0;
    }
  }
  if (pairs_a == 0 || pairs_b == 0) {
    throw std::invalid_argument("kendall tau undefined for a constant vector");
  }
  return static_cast<double>(concordant_minus_discordant) /
         std::sqrt(static_cast<double>(pairs_a) * static_cast<double>(pairs_b));
}

double r2_score(std::span<const double> reference,
                std::span<const double> candidate) {
  check_pair(reference, candidate);
  const double m = mean(reference);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ss_res += (reference[i] - candidate[i]) * (reference[i] - candidate[i]);
    ss_tot += (reference[i] - m) * (reference[i] - m);
  }
  if (ss_tot == 0.0) throw std::invalid_argument("r2 undefined: reference has zero variance");
  return 1.0 - ss_res / ss_tot;
}

double surrogate_value(const Explanation& explanation, const Coalition& z) {
  double g = explanation.phi0;
  for (std::size_t i = 0; i < explanation.phis.size(); ++i) {
    if (z.contains(i)) g += explanation.phis[i];
  }
  return g;
}

double adherence(const WeightedCoalitionSet& set, std::span<const double> values,
                 const Explanation& explanation, Task task) {
  if (set.coalitions.size() != values.size() || values.empty()) {
    throw std::invalid_argument("adherence needs one value per coalition");
  }
  std::vector<double> g;
  g.reserve(values.size());
  for (const auto& z : set.coalitions) g.push_back(surrogate_value(explanation, z));
  if (task == Task::regression) return r2_score(values, g);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    agree += (g[i] >= 0.5) == (values[i] >= 0.5);
  }
  return static_cast<double>(agree) / static_cast<double>(g.size());
}

std::string csv_row(const std::string& instance, std::uint64_t budget,
                    Strategy strategy, const std::string& metric, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return instance + "," + std::to_string(budget) + "," +
         std::string(to_string(strategy)) + "," + metric + "," + buf;
}

std::vector<std::string> csv_rows(const StabilityReport& r) {
  return {csv_row(r.instance, r.budget, r.strategy, "jaccard", r.jaccard)};
}

std::vector<std::string> csv_rows(const AgreementReport& r) {
  return {csv_row(r.instance, r.budget, r.strategy, "kendall_tau", r.kendall_tau),
          csv_row(r.instance, r.budget, r.strategy, "r2", r.r2)};
}

nlohmann::json to_json(const StabilityReport& r) {
  return {{"instance", r.instance}, {"budget", r.budget},
          {"strategy", to_string(r.strategy)}, {"n_runs", r.n_runs},
          {"jaccard", r.jaccard}};
}

nlohmann::json to_json(const AgreementReport& r) {
  return {{"instance", r.instance}, {"budget", r.budget},
          {"strategy", to_string(r.strategy)}, {"reference", r.reference},
          {"kendall_tau", r.kendall_tau}, {"r2", r.r2}};
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sequence");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of an empty sequence");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace stshap
