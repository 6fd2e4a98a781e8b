#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stshap/explanation.hpp"
#include "stshap/sampler.hpp"
#include "stshap/value_function.hpp"

namespace stshap {

// Sorted, duplicate-free feature indices.
using FeatureSet = std::vector<std::size_t>;

// |S1 ∩ ... ∩ Sn| / |S1 ∪ ... ∪ Sn|. Needs n >= 2 non-empty sets.
double jaccard_n(std::span<const FeatureSet> sets);

// Kendall tau-b. Throws if either vector is constant.
double kendall_tau(std::span<const double> a, std::span<const double> b);

// 1 - SS_res / SS_tot with the reference as ground truth. Not symmetric.
double r2_score(std::span<const double> reference,
                std::span<const double> candidate);

// Fidelity of the surrogate g on its own training coalitions: R^2 for
// regression, agreement on the side of 0.5 for classification.
double adherence(const WeightedCoalitionSet& set, std::span<const double> values,
                 const Explanation& explanation, Task task);

// Surrogate prediction phi0 + sum of phi over present features.
double surrogate_value(const Explanation& explanation, const Coalition& z);

struct StabilityReport {
  std::string instance;
  std::uint64_t budget = 0;
  Strategy strategy = Strategy::st_shap;
  std::size_t n_runs = 0;
  double jaccard = 0.0;
};

struct AgreementReport {
  std::string instance;
  Strategy strategy = Strategy::st_shap;
  std::uint64_t budget = 0;
  std::string reference = "exact";
  double kendall_tau = 0.0;
  double r2 = 0.0;
};

// CSV header/row pairs in the (instance, budget, strategy, metric, value) form.
inline constexpr const char* kMetricCsvHeader = "instance,budget,strategy,metric,value";
std::string csv_row(const std::string& instance, std::uint64_t budget,
                    Strategy strategy, const std::string& metric, double value);
std::vector<std::string> csv_rows(const StabilityReport& r);
std::vector<std::string> csv_rows(const AgreementReport& r);

nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const AgreementReport& r);

double mean(std::span<const double> xs);
double median(std::vector<double> xs);

}  // namespace stshap
