#include "stshap/explanation.hpp"

#include <cmath>

namespace stshap {

double Explanation::local_accuracy_gap() const {
  double total = phi0;
  for (double p : phis) total += p;
  return std::abs(total - fx);
}

nlohmann::json to_json(const Explanation& e) {
  return {{"phi0", e.phi0},
          {"phis", e.phis},
          {"support", e.support},
          {"strategy", to_string(e.strategy)},
          {"budget", e.budget},
          {"seed", e.seed},
          {"fx", e.fx}};
}

Explanation explanation_from_json(const nlohmann::json& j) {
  Explanation e;
  e.phi0 = j.at("phi0").get<double>();
  e.phis = j.at("phis").get<std::vector<double>>();
  e.support = j.at("support").get<std::vector<std::size_t>>();
  e.strategy = parse_strategy(j.at("strategy").get<std::string>());
  e.budget = j.at("budget").get<std::uint64_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.fx = j.at("fx").get<double>();
  return e;
}

}  // namespace stshap
