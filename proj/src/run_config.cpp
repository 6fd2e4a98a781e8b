#include "stshap/run_config.hpp"

#include <fstream>
#include <set>

#include "stshap/errors.hpp"

namespace stshap {

std::string_view to_string(Task task) {
  return task == Task::regression ? "regression" : "classification";
}

Task parse_task(std::string_view name) {
  if (name == "regression") return Task::regression;
  if (name == "classification") return Task::classification;
  throw ConfigError("unknown task \"" + std::string(name) +
                    "\" (expected regression or classification)");
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T value{};
  read(j, key, value);
  out = value;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"dataset", "features", "target", "categorical", "model",
                  "background", "split", "instances", "n_instances",
                  "strategies", "budgets", "explanation_size", "runs", "seed",
                  "output", "exact_cap", "threads", "solver"},
                 "config");
  RunConfig c;
  read(j, "dataset", c.dataset);
  read(j, "features", c.features);
  read(j, "target", c.target);
  read(j, "categorical", c.categorical);
  read(j, "instances", c.instances);
  read(j, "n_instances", c.n_instances);
  read(j, "budgets", c.budgets);
  read(j, "explanation_size", c.explanation_size);
  read(j, "runs", c.runs);
  read(j, "seed", c.seed);
  read(j, "output", c.output_dir);
  read(j, "exact_cap", c.exact_cap);
  read(j, "threads", c.threads);

  if (j.contains("strategies")) {
    std::vector<std::string> names;
    read(j, "strategies", names);
    if (names.empty()) throw ConfigError("strategies must not be empty");
    c.strategies.clear();
    for (const auto& n : names) {
      try {
        c.strategies.push_back(parse_strategy(n));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"type", "lambda", "k", "class", "command", "task", "game"},
                   "model");
    read(m, "type", c.model.type);
    read(m, "lambda", c.model.ridge_lambda);
    read(m, "k", c.model.knn_k);
    read(m, "class", c.model.explained_class);
    read(m, "command", c.model.command);
    read(m, "game", c.model.game_path);
    if (m.contains("task")) c.model.task = parse_task(m.at("task").get<std::string>());
  }
  if (j.contains("background")) {
    const auto& b = j.at("background");
    reject_unknown(b, {"size", "rows"}, "background");
    read(b, "size", c.background_size);
    read(b, "rows", c.background_rows);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    reject_unknown(s, {"test_fraction", "seed"}, "split");
    read(s, "test_fraction", c.test_fraction);
    read(s, "seed", c.split_seed);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s, {"accuracy_tolerance", "ridge_jitter", "pivot_tolerance"}, "solver");
    read(s, "accuracy_tolerance", c.solver.accuracy_tolerance);
    read(s, "ridge_jitter", c.solver.ridge_jitter);
    read(s, "pivot_tolerance", c.solver.pivot_tolerance);
  }

  static const std::set<std::string> kModels{"ridge", "knn", "external", "game"};
  if (!kModels.count(c.model.type)) {
    throw ConfigError("unknown model type \"" + c.model.type +
                      "\" (expected ridge, knn, external or game)");
  }
  if (c.model.type == "external" && c.model.command.empty()) {
    throw ConfigError("external model needs a command");
  }
  if (c.model.type == "game" && c.model.game_path.empty()) {
    throw ConfigError("game model needs a game file");
  }
  if (c.model.type != "game") {
    if (c.dataset.empty()) throw ConfigError("no dataset given");
    if (c.target.empty()) throw ConfigError("no target column given");
  }
  if (c.background_size == 0) throw ConfigError("background size must be positive");
  if (c.runs && *c.runs == 0) throw ConfigError("runs must be positive");
  if (c.explanation_size && *c.explanation_size == 0) {
    throw ConfigError("explanation size must be positive");
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json model{{"type", c.model.type}, {"task", to_string(c.model.task)}};
  if (c.model.type == "ridge") model["lambda"] = c.model.ridge_lambda;
  if (c.model.type == "knn") model["k"] = c.model.knn_k;
  if (c.model.explained_class) model["class"] = *c.model.explained_class;
  if (c.model.type == "external") model["command"] = c.model.command;
  if (c.model.type == "game") model["game"] = c.model.game_path;

  std::vector<std::string> strategies;
  for (auto s : c.strategies) strategies.emplace_back(to_string(s));

  nlohmann::json j{
      {"dataset", c.dataset},
      {"features", c.features},
      {"target", c.target},
      {"categorical", c.categorical},
      {"model", std::move(model)},
      {"background", {{"size", c.background_size}, {"rows", c.background_rows}}},
      {"split", {{"test_fraction", c.test_fraction}, {"seed", c.split_seed}}},
      {"instances", c.instances},
      {"n_instances", c.n_instances},
      {"strategies", strategies},
      {"budgets", c.budgets},
      {"explanation_size", nullptr},
      {"runs", nullptr},
      {"seed", c.seed},
      {"output", c.output_dir},
      {"exact_cap", c.exact_cap},
      {"threads", c.threads},
      {"solver",
       {{"accuracy_tolerance", c.solver.accuracy_tolerance},
        {"ridge_jitter", c.solver.ridge_jitter},
        {"pivot_tolerance", c.solver.pivot_tolerance}}}};
  if (c.explanation_size) j["explanation_size"] = *c.explanation_size;
  if (c.runs) j["runs"] = *c.runs;
  return j;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace stshap
