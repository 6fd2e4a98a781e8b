#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "stshap/explanation.hpp"
#include "stshap/metrics.hpp"
#include "stshap/run_config.hpp"
#include "stshap/value_function.hpp"

namespace stshap {

struct ExperimentInstance {
  std::string id;  // "row<k>" for dataset rows, "game" for a synthetic game
  Instance x;
  std::shared_ptr<const ValueFunction> value_function;
};

// Data, model and value functions wired from a RunConfig.
struct Experiment {
  RunConfig config;  // with background size and instances resolved
  std::size_t feature_count = 0;
  std::vector<std::string> feature_names;
  Task task = Task::regression;
  std::vector<ExperimentInstance> instances;
};

Experiment build_experiment(const RunConfig& config);

struct ExplainOutput {
  std::vector<std::string> files;
  std::vector<std::string> instance_ids;
  std::vector<Explanation> explanations;
};

struct AdherenceReport {
  std::string instance;
  std::uint64_t budget = 0;
  Strategy strategy = Strategy::st_shap;
  std::size_t n_runs = 0;
  double adherence = 0.0;
};

struct LayersOutput {
  std::string text;
  nlohmann::json json;
};

// Each command writes <output>/config.resolved.json plus its own files and
// returns what it wrote. Outputs are byte-identical for identical configs.
ExplainOutput cmd_explain(const RunConfig& config);
std::vector<StabilityReport> cmd_stability(const RunConfig& config);
std::vector<AdherenceReport> cmd_adherence(const RunConfig& config);
std::vector<AgreementReport> cmd_compare_exact(const RunConfig& config);
LayersOutput cmd_layers(std::size_t feature_count, std::uint64_t budget);

}  // namespace stshap
