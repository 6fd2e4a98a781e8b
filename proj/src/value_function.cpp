#include "stshap/value_function.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "stshap/errors.hpp"

namespace stshap {

// ---- RidgeRegression -------------------------------------------------------

RidgeRegression::RidgeRegression(Eigen::VectorXd coefficients, double intercept)
    : coefficients_(std::move(coefficients)), intercept_(intercept) {}

RidgeRegression RidgeRegression::fit(const RowMatrix& x,
                                     std::span<const double> y, double lambda) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != y.size()) {
    throw std::invalid_argument("ridge fit needs one target per non-empty row");
  }
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), y.size());
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = target.mean();
  const Eigen::MatrixXd centered = x.rowwise() - x_mean;
  Eigen::MatrixXd gram = centered.transpose() * centered;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs =
      centered.transpose() * (target.array() - y_mean).matrix();
  Eigen::VectorXd beta = gram.ldlt().solve(rhs);
  const double intercept = y_mean - x_mean.dot(beta);
  return RidgeRegression(std::move(beta), intercept);
}

std::vector<double> RidgeRegression::predict(const RowMatrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != feature_count()) {
    throw std::invalid_argument("ridge predict: wrong feature count");
  }
  const Eigen::VectorXd out = (rows * coefficients_).array() + intercept_;
  return {out.data(), out.data() + out.size()};
}

// ---- KnnClassifier ---------------------------------------------------------

KnnClassifier::KnnClassifier(RowMatrix x, std::vector<int> labels,
                             std::size_t k)
    : train_(std::move(x)), labels_(std::move(labels)), k_(k) {
  if (train_.rows() == 0 || static_cast<std::size_t>(train_.rows()) != labels_.size()) {
    throw std::invalid_argument("knn needs one label per non-empty row");
  }
  if (k_ == 0) throw std::invalid_argument("knn k must be positive");
  k_ = std::min<std::size_t>(k_, train_.rows());
  classes_ = labels_;
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
}

std::vector<double> KnnClassifier::class_probabilities(
    std::span<const double> row) const {
  const Eigen::Map<const Eigen::RowVectorXd> query(row.data(), row.size());
  std::vector<std::pair<double, std::size_t>> dist(train_.rows());
  for (Eigen::Index i = 0; i < train_.rows(); ++i) {
    dist[i] = {(train_.row(i) - query).squaredNorm(), static_cast<std::size_t>(i)};
  }
  std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
  std::vector<double> votes(classes_.size(), 0.0);
  for (std::size_t n = 0; n < k_; ++n) {
    const int label = labels_[dist[n].second];
    const auto pos =
        std::lower_bound(classes_.begin(), classes_.end(), label) - classes_.begin();
    votes[pos] += 1.0;
  }
  for (double& v : votes) v /= static_cast<double>(k_);
  return votes;
}

int KnnClassifier::predicted_class(std::span<const double> row) const {
  const auto probs = class_probabilities(row);
  return classes_[std::max_element(probs.begin(), probs.end()) - probs.begin()];
}

void KnnClassifier::set_explained_class(int label) {
  if (!std::binary_search(classes_.begin(), classes_.end(), label)) {
    throw std::invalid_argument("explained class " + std::to_string(label) +
                                " does not occur in the training labels");
  }
  explained_class_ = label;
}

std::vector<double> KnnClassifier::predict(const RowMatrix& rows) const {
  if (!explained_class_) {
    throw std::logic_error("knn: explained class not set");
  }
  if (static_cast<std::size_t>(rows.cols()) != feature_count()) {
    throw std::invalid_argument("knn predict: wrong feature count");
  }
  const auto pos = std::lower_bound(classes_.begin(), classes_.end(),
                                    *explained_class_) - classes_.begin();
  std::vector<double> out(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out[r] = class_probabilities(std::span(rows.row(r).data(), rows.cols()))[pos];
  }
  return out;
}

// ---- BackgroundSet ---------------------------------------------------------

BackgroundSet::BackgroundSet(RowMatrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0) {
    throw std::invalid_argument("background set needs at least one row");
  }
}

// ---- SyntheticGame ---------------------------------------------------------

SyntheticGame SyntheticGame::from_table(std::size_t feature_count,
                                        std::vector<double> values) {
  check_feature_count(feature_count);
  if (feature_count > 30 || values.size() != (std::size_t{1} << feature_count)) {
    throw std::invalid_argument("dense game table needs 2^M values");
  }
  SyntheticGame game(feature_count, Rule::table);
  game.table_.reserve(values.size());
  for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
    game.table_.emplace(mask, values[mask]);
  }
  return game;
}

SyntheticGame SyntheticGame::from_entries(
    std::size_t feature_count,
    std::unordered_map<std::uint64_t, double> entries) {
  check_feature_count(feature_count);
  SyntheticGame game(feature_count, Rule::table);
  for (const auto& [mask, value] : entries) {
    if ((mask & ~full_mask(feature_count)) != 0) {
      throw std::invalid_argument("game table mask has bits beyond M");
    }
  }
  game.table_ = std::move(entries);
  return game;
}

SyntheticGame SyntheticGame::additive(std::vector<double> weights) {
  check_feature_count(weights.size());
  SyntheticGame game(weights.size(), Rule::additive);
  game.params_ = std::move(weights);
  return game;
}

SyntheticGame SyntheticGame::cardinality(std::vector<double> by_size) {
  if (by_size.empty()) throw std::invalid_argument("cardinality game needs M+1 values");
  check_feature_count(by_size.size() - 1);
  SyntheticGame game(by_size.size() - 1, Rule::cardinality);
  game.params_ = std::move(by_size);
  return game;
}

SyntheticGame SyntheticGame::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("M")) {
    throw std::invalid_argument("game JSON must be an object with \"M\"");
  }
  const auto m = j.at("M").get<std::size_t>();
  check_feature_count(m);
  const std::string rule = j.value("rule", std::string("table"));
  if (rule == "additive") {
    auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != m) throw std::invalid_argument("additive game needs M weights");
    return additive(std::move(weights));
  }
  if (rule == "cardinality") {
    auto by_size = j.at("by_size").get<std::vector<double>>();
    if (by_size.size() != m + 1) {
      throw std::invalid_argument("cardinality game needs M+1 values in by_size");
    }
    return cardinality(std::move(by_size));
  }
  if (rule != "table") throw std::invalid_argument("unknown game rule: " + rule);
  std::unordered_map<std::uint64_t, double> entries;
  for (const auto& [key, value] : j.at("values").items()) {
    if (key.size() != m) {
      throw std::invalid_argument("game mask \"" + key + "\" must have M characters");
    }
    entries[Coalition::from_string(key).mask()] = value.get<double>();
  }
  return from_entries(m, std::move(entries));
}

nlohmann::json SyntheticGame::to_json() const {
  nlohmann::json j;
  j["M"] = feature_count_;
  switch (rule_) {
    case Rule::additive:
      j["rule"] = "additive";
      j["weights"] = params_;
      break;
    case Rule::cardinality:
      j["rule"] = "cardinality";
      j["by_size"] = params_;
      break;
    case Rule::table: {
      std::vector<std::uint64_t> masks;
      for (const auto& entry : table_) masks.push_back(entry.first);
      std::sort(masks.begin(), masks.end());
      nlohmann::json values = nlohmann::json::object();
      for (auto mask : masks) {
        values[Coalition(feature_count_, mask).to_string()] = table_.at(mask);
      }
      j["values"] = std::move(values);
      break;
    }
  }
  return j;
}

double SyntheticGame::value(const Coalition& coalition) const {
  if (coalition.feature_count() != feature_count_) {
    throw std::invalid_argument("coalition and game disagree on M");
  }
  switch (rule_) {
    case Rule::additive: {
      double sum = 0.0;
      for (std::size_t i = 0; i < feature_count_; ++i) {
        if (coalition.contains(i)) sum += params_[i];
      }
      return sum;
    }
    case Rule::cardinality:
      return params_[coalition.size()];
    case Rule::table: {
      const auto it = table_.find(coalition.mask());
      if (it == table_.end()) {
        throw std::out_of_range("game table has no entry for mask " +
                                coalition.to_string());
      }
      return it->second;
    }
  }
  return 0.0;
}

double game_value(const SyntheticGame& game, const Coalition& coalition) {
  return game.value(coalition);
}

// ---- Value functions -------------------------------------------------------

MarginalValueFunction::MarginalValueFunction(
    std::shared_ptr<const Model> model, Instance x,
    std::shared_ptr<const BackgroundSet> background,
    std::size_t max_rows_per_call)
    : model_(std::move(model)),
      x_(std::move(x)),
      background_(std::move(background)),
      max_rows_per_call_(std::max<std::size_t>(max_rows_per_call, 1)) {
  if (!model_ || !background_) throw std::invalid_argument("null model or background");
  check_feature_count(x_.size());
  if (model_->feature_count() != x_.size() ||
      background_->feature_count() != x_.size()) {
    throw std::invalid_argument("instance, model and background disagree on M");
  }
}

std::vector<double> MarginalValueFunction::evaluate_batch(
    std::span<const Coalition> coalitions) const {
  const std::size_t m = x_.size();
  const std::size_t b = background_->size();
  const RowMatrix& bg = background_->rows();
  for (const auto& c : coalitions) {
    if (c.feature_count() != m) {
      throw std::invalid_argument("coalition and instance disagree on M");
    }
  }

  std::vector<double> out(coalitions.size(), 0.0);
  std::size_t next = 0;
  while (next < coalitions.size()) {
    // Group consecutive coalitions into one model call. The grand coalition
    // contributes the single row x; every other coalition contributes B rows.
    std::size_t end = next;
    std::size_t rows = 0;
    while (end < coalitions.size()) {
      const std::size_t need = coalitions[end].is_full() ? 1 : b;
      if (rows > 0 && rows + need > max_rows_per_call_) break;
      rows += need;
      ++end;
    }
    RowMatrix batch(rows, m);
    std::size_t r = 0;
    for (std::size_t c = next; c < end; ++c) {
      const Coalition& z = coalitions[c];
      if (z.is_full()) {
        for (std::size_t i = 0; i < m; ++i) batch(r, i) = x_[i];
        ++r;
        continue;
      }
      for (std::size_t row = 0; row < b; ++row, ++r) {
        for (std::size_t i = 0; i < m; ++i) {
          batch(r, i) = z.contains(i) ? x_[i] : bg(row, i);
        }
      }
    }
    const std::vector<double> pred = model_->predict(batch);
    if (pred.size() != rows) {
      throw ModelError(0, "expected " + std::to_string(rows) +
                              " predictions, got " + std::to_string(pred.size()));
    }
    r = 0;
    for (std::size_t c = next; c < end; ++c) {
      if (coalitions[c].is_full()) {
        out[c] = pred[r++];
        continue;
      }
      double sum = 0.0;
      for (std::size_t row = 0; row < b; ++row) sum += pred[r++];
      out[c] = sum / static_cast<double>(b);
    }
    next = end;
  }
  return out;
}

std::vector<double> GameValueFunction::evaluate_batch(
    std::span<const Coalition> coalitions) const {
  std::vector<double> out;
  out.reserve(coalitions.size());
  for (const auto& c : coalitions) out.push_back(game_value(game_, c));
  return out;
}

std::vector<double> CountingValueFunction::evaluate_batch(
    std::span<const Coalition> coalitions) const {
  evaluations_ += coalitions.size();
  ++batches_;
  return inner_.evaluate_batch(coalitions);
}

}  // namespace stshap
