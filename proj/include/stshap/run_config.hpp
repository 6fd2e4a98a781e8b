#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stshap/dataset.hpp"
#include "stshap/sampler.hpp"
#include "stshap/value_function.hpp"
#include "stshap/wls_explainer.hpp"

namespace stshap {

struct ModelSpec {
  // ridge | knn | external | game
  std::string type = "ridge";
  double ridge_lambda = 1e-6;
  std::size_t knn_k = 5;
  // Class whose probability is explained; default: predicted class on x.
  std::optional<int> explained_class;
  // external: shell command speaking the line protocol.
  std::string command;
  Task task = Task::regression;
  // game: path to a synthetic game JSON file.
  std::string game_path;
};

struct RunConfig {
  std::string dataset;
  std::vector<std::string> features;
  std::string target;
  std::map<std::string, CategoryCodes> categorical;
  ModelSpec model;

  std::size_t background_size = 100;
  std::vector<std::size_t> background_rows;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;

  std::vector<std::size_t> instances;
  std::size_t n_instances = 10;

  std::vector<Strategy> strategies{Strategy::kernel_shap, Strategy::st_shap};
  std::vector<std::uint64_t> budgets;
  std::optional<std::size_t> explanation_size;
  // Seeds seed, seed+1, ..., seed+runs-1. Unset: 1 for explain, 20 otherwise.
  std::optional<std::size_t> runs;
  std::uint64_t seed = 0;

  std::string output_dir = "stshap-out";
  std::size_t exact_cap = 20;
  // 0 = hardware concurrency.
  std::size_t threads = 0;
  SolverOptions solver;

  std::size_t runs_or(std::size_t fallback) const { return runs.value_or(fallback); }
};

// Unknown keys are rejected so typos surface as config errors.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

RunConfig load_config_file(const std::string& path);

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

}  // namespace stshap
