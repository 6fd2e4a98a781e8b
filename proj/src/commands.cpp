#include "stshap/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "stshap/errors.hpp"
#include "stshap/exact.hpp"
#include "stshap/external_model.hpp"

namespace stshap {

namespace fs = std::filesystem;

namespace {

// Runs fn(i) for i in [0, n) on a small pool. Results are stored by index by
// the callers, so completion order never reaches the outputs.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mutex);
        if (failure || next == n) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::uint64_t> seeds_for(const RunConfig& c, std::size_t runs) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < runs; ++r) seeds.push_back(c.seed + r);
  return seeds;
}

void validate_for(const Experiment& e) {
  const std::size_t m = e.feature_count;
  for (auto b : e.config.budgets) {
    try {
      check_budget(m, b);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
  }
  if (e.config.explanation_size && *e.config.explanation_size > m) {
    throw ConfigError("explanation size " + std::to_string(*e.config.explanation_size) +
                      " exceeds M=" + std::to_string(m));
  }
  const bool needs_budget =
      std::any_of(e.config.strategies.begin(), e.config.strategies.end(),
                  [](Strategy s) { return s != Strategy::layer1; });
  if (needs_budget && e.config.budgets.empty()) {
    throw ConfigError("no budgets given for a sampling strategy");
  }
}

// (strategy, budget) pairs in output order; layer1 appears once.
std::vector<std::pair<Strategy, std::uint64_t>> sweep(const Experiment& e) {
  std::vector<std::pair<Strategy, std::uint64_t>> out;
  for (auto s : e.config.strategies) {
    if (s == Strategy::layer1) {
      out.emplace_back(s, layer_size(e.feature_count, 1));
      continue;
    }
    for (auto b : e.config.budgets) out.emplace_back(s, b);
  }
  return out;
}

nlohmann::json resolved(const Experiment& e, const std::string& command,
                        const std::vector<std::uint64_t>& seeds) {
  nlohmann::json j = to_json(e.config);
  j["command"] = command;
  j["seeds"] = seeds;
  j["M"] = e.feature_count;
  j["feature_names"] = e.feature_names;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot write");
  out << text;
}

void write_config(const fs::path& dir, const nlohmann::json& config) {
  write_text(dir / "config.resolved.json", config.dump(2) + "\n");
}

void write_csv(const fs::path& path, const nlohmann::json& config,
               const std::string& header, const std::vector<std::string>& rows) {
  std::string text = "# config: " + config.dump() + "\n" + header + "\n";
  for (const auto& r : rows) text += r + "\n";
  write_text(path, text);
}

std::optional<std::size_t> effective_size(const Experiment& e) {
  return e.config.explanation_size;
}

}  // namespace

Experiment build_experiment(const RunConfig& config) {
  Experiment e;
  e.config = config;
  const ModelSpec& spec = config.model;

  if (spec.type == "game") {
    std::ifstream in(spec.game_path);
    if (!in) throw ConfigError(spec.game_path + ": cannot open game file");
    nlohmann::json j;
    try {
      in >> j;
      auto vf = std::make_shared<GameValueFunction>(SyntheticGame::from_json(j));
      e.feature_count = vf->feature_count();
      e.instances.push_back({"game", {}, std::move(vf)});
    } catch (const nlohmann::json::exception& err) {
      throw ConfigError(spec.game_path + ": " + err.what());
    } catch (const std::invalid_argument& err) {
      throw ConfigError(spec.game_path + ": " + err.what());
    }
    for (std::size_t i = 0; i < e.feature_count; ++i) {
      e.feature_names.push_back("p" + std::to_string(i));
    }
    e.config.instances = {0};
    validate_for(e);
    return e;
  }

  const Dataset data = load_csv(config.dataset, config.features, config.target,
                                config.categorical);
  e.feature_count = data.feature_count();
  e.feature_names = data.feature_names;
  e.config.features = data.feature_names;
  if (e.feature_count > kMaxFeatures) {
    throw ConfigError("at most 64 features are supported");
  }

  const Split split = split_rows(data.rows(), config.test_fraction, config.split_seed);
  const RowMatrix train_x = select_rows(data.x, split.train);
  std::vector<double> train_y;
  for (auto r : split.train) train_y.push_back(data.y[r]);

  std::vector<std::size_t> bg_rows = config.background_rows;
  if (bg_rows.empty()) {
    const std::size_t b = std::min(config.background_size, split.train.size());
    bg_rows.assign(split.train.begin(), split.train.begin() + b);
  }
  for (auto r : bg_rows) {
    if (r >= data.rows()) throw ConfigError("background row " + std::to_string(r) + " out of range");
  }
  e.config.background_size = bg_rows.size();
  e.config.background_rows = bg_rows;
  auto background = std::make_shared<const BackgroundSet>(select_rows(data.x, bg_rows));

  std::vector<std::size_t> rows = config.instances;
  if (rows.empty()) {
    const auto& pool = split.test.empty() ? split.train : split.test;
    rows.assign(pool.begin(), pool.begin() + std::min(config.n_instances, pool.size()));
  }
  for (auto r : rows) {
    if (r >= data.rows()) throw ConfigError("instance row " + std::to_string(r) + " out of range");
  }
  e.config.instances = rows;
  e.config.n_instances = rows.size();

  std::shared_ptr<const Model> shared_model;
  std::shared_ptr<const KnnClassifier> knn;
  if (spec.type == "ridge") {
    shared_model = std::make_shared<RidgeRegression>(
        RidgeRegression::fit(train_x, train_y, spec.ridge_lambda));
    e.task = Task::regression;
  } else if (spec.type == "knn") {
    std::vector<int> labels;
    for (double y : train_y) {
      if (y != std::floor(y)) throw ConfigError("knn target values must be integral class codes");
      labels.push_back(static_cast<int>(y));
    }
    knn = std::make_shared<KnnClassifier>(train_x, labels, spec.knn_k);
    e.task = Task::classification;
  } else {
    shared_model = std::make_shared<ExternalProcessModel>(spec.command, e.feature_count,
                                                          spec.task);
    e.task = spec.task;
  }
  e.config.model.task = e.task;

  for (auto r : rows) {
    Instance x(data.x.row(r).data(), data.x.row(r).data() + e.feature_count);
    std::shared_ptr<const Model> model = shared_model;
    if (knn) {
      auto local = std::make_shared<KnnClassifier>(*knn);
      try {
        local->set_explained_class(spec.explained_class.value_or(local->predicted_class(x)));
      } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
      }
      model = std::move(local);
    }
    auto vf = std::make_shared<MarginalValueFunction>(model, x, background);
    e.instances.push_back({"row" + std::to_string(r), std::move(x), std::move(vf)});
  }
  validate_for(e);
  return e;
}

ExplainOutput cmd_explain(const RunConfig& config) {
  const Experiment e = build_experiment(config);
  const auto seeds = seeds_for(e.config, e.config.runs_or(1));
  const auto jobs = sweep(e);
  const nlohmann::json cfg = resolved(e, "explain", seeds);

  struct Item {
    std::string name;
    std::string instance;
    Explanation explanation;
  };
  std::vector<std::vector<Item>> per_instance(e.instances.size());
  parallel_for(e.instances.size(), e.config.threads, [&](std::size_t i) {
    const auto& inst = e.instances[i];
    for (const auto& [strategy, budget] : jobs) {
      const std::vector<std::uint64_t> run_seeds =
          strategy == Strategy::layer1 ? std::vector<std::uint64_t>{0} : seeds;
      for (auto seed : run_seeds) {
        Explanation ex = explain(*inst.value_function, strategy, budget, seed,
                                 effective_size(e), e.config.solver);
        std::string name = inst.id + "_" + std::string(to_string(strategy)) + "_b" +
                           std::to_string(budget) + "_s" + std::to_string(seed) + ".json";
        per_instance[i].push_back({std::move(name), inst.id, std::move(ex)});
      }
    }
  });

  const fs::path dir = e.config.output_dir;
  write_config(dir, cfg);
  ExplainOutput out;
  for (const auto& items : per_instance) {
    for (const auto& item : items) {
      nlohmann::json j{{"config", cfg},
                       {"instance", item.instance},
                       {"explanation", to_json(item.explanation)}};
      const fs::path path = dir / "explanations" / item.name;
      write_text(path, j.dump(2) + "\n");
      out.files.push_back(path.string());
      out.instance_ids.push_back(item.instance);
      out.explanations.push_back(item.explanation);
    }
  }
  return out;
}

std::vector<StabilityReport> cmd_stability(const RunConfig& config) {
  const Experiment e = build_experiment(config);
  const std::size_t runs = e.config.runs_or(20);
  if (runs < 2) throw ConfigError("stability needs at least 2 runs per instance");
  const auto seeds = seeds_for(e.config, runs);
  const auto jobs = sweep(e);
  const nlohmann::json cfg = resolved(e, "stability", seeds);

  std::vector<std::vector<StabilityReport>> per_instance(e.instances.size());
  parallel_for(e.instances.size(), e.config.threads, [&](std::size_t i) {
    const auto& inst = e.instances[i];
    for (const auto& [strategy, budget] : jobs) {
      std::vector<FeatureSet> supports;
      for (auto seed : seeds) {
        supports.push_back(explain(*inst.value_function, strategy, budget, seed,
                                   effective_size(e), e.config.solver)
                               .support);
      }
      StabilityReport r;
      r.instance = inst.id;
      r.budget = budget;
      r.strategy = strategy;
      r.n_runs = runs;
      r.jaccard = jaccard_n(supports);
      per_instance[i].push_back(r);
    }
  });

  std::vector<StabilityReport> reports;
  for (const auto& v : per_instance) reports.insert(reports.end(), v.begin(), v.end());
  for (const auto& [strategy, budget] : jobs) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (r.strategy == strategy && r.budget == budget && r.instance != "mean") {
        values.push_back(r.jaccard);
      }
    }
    reports.push_back({"mean", budget, strategy, runs, mean(values)});
  }

  std::vector<std::string> rows;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) {
    auto csv = csv_rows(r);
    rows.insert(rows.end(), csv.begin(), csv.end());
    j.push_back(to_json(r));
  }
  const fs::path dir = e.config.output_dir;
  write_config(dir, cfg);
  write_csv(dir / "metrics" / "stability.csv", cfg, kMetricCsvHeader, rows);
  write_text(dir / "metrics" / "stability.json",
             nlohmann::json{{"config", cfg}, {"reports", j}}.dump(2) + "\n");
  return reports;
}

std::vector<AdherenceReport> cmd_adherence(const RunConfig& config) {
  const Experiment e = build_experiment(config);
  const std::size_t runs = e.config.runs_or(20);
  const auto seeds = seeds_for(e.config, runs);
  const auto jobs = sweep(e);
  const nlohmann::json cfg = resolved(e, "adherence", seeds);

  std::vector<std::vector<AdherenceReport>> per_instance(e.instances.size());
  parallel_for(e.instances.size(), e.config.threads, [&](std::size_t i) {
    const auto& inst = e.instances[i];
    for (const auto& [strategy, budget] : jobs) {
      std::vector<double> scores;
      for (auto seed : seeds) {
        const ExplainTrace t = explain_traced(*inst.value_function, strategy, budget,
                                              seed, effective_size(e), e.config.solver);
        double score = std::numeric_limits<double>::quiet_NaN();
        try {
          score = adherence(t.set, t.values, t.explanation, e.task);
        } catch (const std::invalid_argument&) {
          // Constant f_x over the coalitions: R^2 undefined.
        }
        scores.push_back(score);
      }
      per_instance[i].push_back({inst.id, budget, strategy, runs, mean(scores)});
    }
  });

  std::vector<AdherenceReport> reports;
  for (const auto& v : per_instance) reports.insert(reports.end(), v.begin(), v.end());
  for (const auto& [strategy, budget] : jobs) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (r.strategy == strategy && r.budget == budget) values.push_back(r.adherence);
    }
    reports.push_back({"mean", budget, strategy, runs, mean(values)});
  }

  const std::string metric = e.task == Task::regression ? "adherence_r2" : "adherence_accuracy";
  std::vector<std::string> rows;
  for (const auto& r : reports) {
    rows.push_back(csv_row(r.instance, r.budget, r.strategy, metric, r.adherence));
  }
  const fs::path dir = e.config.output_dir;
  write_config(dir, cfg);
  write_csv(dir / "metrics" / "adherence.csv", cfg, kMetricCsvHeader, rows);
  return reports;
}

std::vector<AgreementReport> cmd_compare_exact(const RunConfig& config) {
  const Experiment e = build_experiment(config);
  if (e.feature_count > e.config.exact_cap) {
    throw OracleCapError("compare-exact needs 2^" + std::to_string(e.feature_count) +
                         " evaluations per instance; the cap is M <= " +
                         std::to_string(e.config.exact_cap));
  }
  const auto seeds = seeds_for(e.config, 1);
  const auto jobs = sweep(e);
  const nlohmann::json cfg = resolved(e, "compare-exact", seeds);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  auto guarded = [](auto metric) {
    try {
      return metric();
    } catch (const std::invalid_argument&) {
      return kNaN;
    }
  };

  std::vector<std::vector<AgreementReport>> per_instance(e.instances.size());
  parallel_for(e.instances.size(), e.config.threads, [&](std::size_t i) {
    const auto& inst = e.instances[i];
    const ExactValues exact = exact_shap(*inst.value_function, e.config.exact_cap);
    for (const auto& [strategy, budget] : jobs) {
      // Agreement is measured on full-length attribution vectors.
      const Explanation cand = explain(*inst.value_function, strategy, budget,
                                       seeds.front(), std::nullopt, e.config.solver);
      AgreementReport r;
      r.instance = inst.id;
      r.strategy = strategy;
      r.budget = budget;
      r.kendall_tau = guarded([&] { return kendall_tau(exact.phis, cand.phis); });
      r.r2 = guarded([&] { return r2_score(exact.phis, cand.phis); });
      per_instance[i].push_back(r);
    }
  });

  std::vector<AgreementReport> reports;
  for (const auto& v : per_instance) reports.insert(reports.end(), v.begin(), v.end());
  const std::size_t n_instance_rows = reports.size();
  for (const auto& [strategy, budget] : jobs) {
    std::vector<double> taus;
    std::vector<double> r2s;
    for (std::size_t k = 0; k < n_instance_rows; ++k) {
      const auto& r = reports[k];
      if (r.strategy != strategy || r.budget != budget) continue;
      if (!std::isnan(r.kendall_tau)) taus.push_back(r.kendall_tau);
      if (!std::isnan(r.r2)) r2s.push_back(r.r2);
    }
    AgreementReport mean_row{"mean", strategy, budget, "exact",
                             taus.empty() ? kNaN : mean(taus),
                             r2s.empty() ? kNaN : mean(r2s)};
    AgreementReport median_row{"median", strategy, budget, "exact",
                               taus.empty() ? kNaN : median(taus),
                               r2s.empty() ? kNaN : median(r2s)};
    reports.push_back(mean_row);
    reports.push_back(median_row);
  }

  std::vector<std::string> rows;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) {
    auto csv = csv_rows(r);
    rows.insert(rows.end(), csv.begin(), csv.end());
    j.push_back(to_json(r));
  }
  const fs::path dir = e.config.output_dir;
  write_config(dir, cfg);
  write_csv(dir / "metrics" / "compare_exact.csv", cfg, kMetricCsvHeader, rows);
  write_text(dir / "metrics" / "compare_exact.json",
             nlohmann::json{{"config", cfg}, {"reports", j}}.dump(2) + "\n");
  return reports;
}

LayersOutput cmd_layers(std::size_t feature_count, std::uint64_t budget) {
  const SamplingPlan ks = plan_kernel_shap(feature_count, budget, 0);
  const SamplingPlan st = plan_st_shap(feature_count, budget, 0);

  auto cell = [](const LayerAllocation& l) -> std::string {
    switch (l.mode) {
      case LayerMode::complete: return std::to_string(l.count) + " complete";
      case LayerMode::sampled: return std::to_string(l.count) + " sampled";
      case LayerMode::pooled: return "pooled";
      case LayerMode::unused: return "0";
    }
    return "?";
  };

  std::ostringstream text;
  text << "M=" << feature_count << " budget=" << budget << "\n";
  text << std::left << std::setw(7) << "layer" << std::setw(10) << "size"
       << std::setw(16) << "kernel-shap" << "st-shap\n";
  std::vector<std::uint64_t> sizes;
  for (std::size_t i = 0; i < st.layers.size(); ++i) {
    sizes.push_back(st.layers[i].size);
    text << std::left << std::setw(7) << st.layers[i].layer << std::setw(10)
         << st.layers[i].size << std::setw(16) << cell(ks.layers[i])
         << cell(st.layers[i]) << "\n";
  }
  if (ks.pooled_count > 0) {
    std::size_t first = 0;
    std::size_t last = 0;
    for (const auto& l : ks.layers) {
      if (l.mode != LayerMode::pooled) continue;
      if (first == 0) first = l.layer;
      last = l.layer;
    }
    text << "kernel-shap: " << ks.pooled_count << " random over layers " << first
         << "-" << last << "\n";
  }
  text << "complete-layer budgets:";
  for (const auto& cb : complete_layer_budgets(feature_count)) {
    text << " " << cb.cumulative_budget;
  }
  text << "\n";

  std::vector<std::uint64_t> st_counts;
  for (const auto& l : st.layers) st_counts.push_back(l.count);
  LayersOutput out;
  out.text = text.str();
  out.json = {{"M", feature_count},
              {"budget", budget},
              {"layer_sizes", sizes},
              {"st_shap_counts", st_counts},
              {"kernel_shap", to_json(ks)},
              {"st_shap", to_json(st)}};
  return out;
}

}  // namespace stshap
