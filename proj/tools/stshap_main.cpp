// Command-line harness: explain, stability, adherence, compare-exact, layers.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stshap/commands.hpp"
#include "stshap/errors.hpp"
#include "stshap/run_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;
constexpr int kExitOracleCap = 4;

// Flags shared by the experiment subcommands. Set flags override the config
// file key of the same meaning.
struct Overrides {
  std::string config_path;
  std::optional<std::string> dataset, target, model, command, game, task, output;
  std::vector<std::string> features, strategies;
  std::vector<std::uint64_t> budgets;
  std::vector<std::size_t> instances;
  std::optional<std::size_t> n_instances, background_size, k, runs, threads, exact_cap;
  std::optional<std::uint64_t> seed, split_seed;
  std::optional<int> explained_class;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON run configuration");
    app->add_option("--dataset", dataset, "CSV dataset (header row required)");
    app->add_option("--features", features, "feature columns (default: all but target)");
    app->add_option("--target", target, "target column");
    app->add_option("--model", model, "ridge | knn | external | game");
    app->add_option("--command", command, "external model command");
    app->add_option("--game", game, "synthetic game JSON file");
    app->add_option("--task", task, "regression | classification (external models)");
    app->add_option("--class", explained_class, "explained class (knn)");
    app->add_option("--background-size", background_size, "background rows B");
    app->add_option("--split-seed", split_seed, "train/test split seed");
    app->add_option("--instances", instances, "dataset row indices to explain");
    app->add_option("--n-instances", n_instances, "number of test rows to explain");
    app->add_option("--strategy", strategies, "kernel-shap | st-shap | layer1 (repeatable)");
    app->add_option("--budget", budgets, "coalition budgets (repeatable)");
    app->add_option("-k,--explanation-size", k, "number of non-zero attributions");
    app->add_option("--runs", runs, "seeds per instance");
    app->add_option("--seed", seed, "first seed");
    app->add_option("--threads", threads, "worker threads (0 = all cores)");
    app->add_option("--exact-cap", exact_cap, "largest M for the exact oracle");
    app->add_option("-o,--output", output, "output directory");
  }

  stshap::RunConfig resolve() const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw stshap::ConfigError(config_path + ": cannot open config file");
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw stshap::ConfigError(config_path + ": " + e.what());
      }
    }
    if (dataset) j["dataset"] = *dataset;
    if (target) j["target"] = *target;
    if (!features.empty()) j["features"] = features;
    if (model) j["model"]["type"] = *model;
    if (command) j["model"]["command"] = *command;
    if (game) j["model"]["game"] = *game;
    if (task) j["model"]["task"] = *task;
    if (explained_class) j["model"]["class"] = *explained_class;
    if (background_size) j["background"]["size"] = *background_size;
    if (split_seed) j["split"]["seed"] = *split_seed;
    if (!instances.empty()) j["instances"] = instances;
    if (n_instances) j["n_instances"] = *n_instances;
    if (!strategies.empty()) j["strategies"] = strategies;
    if (!budgets.empty()) j["budgets"] = budgets;
    if (k) j["explanation_size"] = *k;
    if (runs) j["runs"] = *runs;
    if (seed) j["seed"] = *seed;
    if (threads) j["threads"] = *threads;
    if (exact_cap) j["exact_cap"] = *exact_cap;
    if (output) j["output"] = *output;
    return stshap::config_from_json(j);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley attributions with Kernel SHAP, ST-SHAP and layer-1 scores"};
  app.require_subcommand(1);

  Overrides explain_flags, stability_flags, adherence_flags, compare_flags;
  auto* explain = app.add_subcommand("explain", "write one explanation per instance/strategy/budget/seed");
  explain_flags.attach(explain);
  auto* stability = app.add_subcommand("stability", "Jaccard stability across seeds");
  stability_flags.attach(stability);
  auto* adherence = app.add_subcommand("adherence", "surrogate fidelity across budgets");
  adherence_flags.attach(adherence);
  auto* compare = app.add_subcommand("compare-exact", "Kendall tau and R^2 against exact Shapley values");
  compare_flags.attach(compare);

  std::size_t layers_m = 0;
  std::uint64_t layers_budget = 0;
  bool layers_json = false;
  auto* layers = app.add_subcommand("layers", "show both sampling plans for (M, budget)");
  layers->add_option("M", layers_m, "feature count")->required();
  layers->add_option("budget", layers_budget, "coalition budget")->required();
  layers->add_flag("--json", layers_json, "print JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*explain) {
      const auto out = stshap::cmd_explain(explain_flags.resolve());
      std::cout << "wrote " << out.files.size() << " explanations\n";
    } else if (*stability) {
      const auto cfg = stability_flags.resolve();
      for (const auto& r : stshap::cmd_stability(cfg)) {
        if (r.instance == "mean") {
          std::cout << stshap::to_string(r.strategy) << " budget=" << r.budget
                    << " mean jaccard=" << r.jaccard << "\n";
        }
      }
    } else if (*adherence) {
      for (const auto& r : stshap::cmd_adherence(adherence_flags.resolve())) {
        if (r.instance == "mean") {
          std::cout << stshap::to_string(r.strategy) << " budget=" << r.budget
                    << " mean adherence=" << r.adherence << "\n";
        }
      }
    } else if (*compare) {
      for (const auto& r : stshap::cmd_compare_exact(compare_flags.resolve())) {
        if (r.instance == "mean" || r.instance == "median") {
          std::cout << stshap::to_string(r.strategy) << " budget=" << r.budget << " "
                    << r.instance << " tau=" << r.kendall_tau << " r2=" << r.r2 << "\n";
        }
      }
    } else if (*layers) {
      const auto out = stshap::cmd_layers(layers_m, layers_budget);
      std::cout << (layers_json ? out.json.dump(2) + "\n" : out.text);
    }
  } catch (const stshap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const stshap::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const stshap::OracleCapError& e) {
    std::cerr << "oracle cap: " << e.what() << "\n";
    return kExitOracleCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
