#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "stshap/coalition.hpp"

namespace stshap {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Feature vector of the explained instance.
using Instance = std::vector<double>;

enum class Task { regression, classification };

// A black box. Batch evaluation returns exactly one output per input row, in
// order, and is deterministic.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::size_t feature_count() const = 0;
  virtual Task task() const = 0;
  virtual std::vector<double> predict(const RowMatrix& rows) const = 0;
};

// Linear regression with a small ridge penalty on the slopes (the intercept
// is not penalized).
class RidgeRegression final : public Model {
 public:
  RidgeRegression(Eigen::VectorXd coefficients, double intercept);

  static RidgeRegression fit(const RowMatrix& x, std::span<const double> y,
                             double lambda = 1e-6);

  std::size_t feature_count() const override { return coefficients_.size(); }
  Task task() const override { return Task::regression; }
  std::vector<double> predict(const RowMatrix& rows) const override;

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  double intercept() const { return intercept_; }

 private:
  Eigen::VectorXd coefficients_;
  double intercept_;
};

// k-nearest-neighbour classifier (Euclidean, majority vote). The explained
// output is the vote fraction of one designated class.
class KnnClassifier final : public Model {
 public:
  KnnClassifier(RowMatrix x, std::vector<int> labels, std::size_t k = 5);

  std::size_t feature_count() const override { return train_.cols(); }
  Task task() const override { return Task::classification; }
  std::vector<double> predict(const RowMatrix& rows) const override;

  const std::vector<int>& classes() const { return classes_; }
  // Vote fractions aligned with classes().
  std::vector<double> class_probabilities(std::span<const double> row) const;
  // Highest vote fraction; ties go to the smaller label.
  int predicted_class(std::span<const double> row) const;

  void set_explained_class(int label);
  std::optional<int> explained_class() const { return explained_class_; }

 private:
  RowMatrix train_;
  std::vector<int> labels_;
  std::vector<int> classes_;
  std::size_t k_;
  std::optional<int> explained_class_;
};

// Reference rows substituted for absent features.
class BackgroundSet {
 public:
  explicit BackgroundSet(RowMatrix rows);

  const RowMatrix& rows() const { return rows_; }
  std::size_t size() const { return rows_.rows(); }
  std::size_t feature_count() const { return rows_.cols(); }
  Eigen::RowVectorXd mean() const { return rows_.colwise().mean(); }

 private:
  RowMatrix rows_;
};

// Cooperative game given by a table over masks or by a closed-form rule.
class SyntheticGame {
 public:
  enum class Rule { table, additive, cardinality };

  // values[mask] for every mask in [0, 2^M).
  static SyntheticGame from_table(std::size_t feature_count,
                                  std::vector<double> values);
  // Sparse table; looking up a missing mask throws.
  static SyntheticGame from_entries(
      std::size_t feature_count,
      std::unordered_map<std::uint64_t, double> entries);
  // v(S) = sum of weights[i] over i in S.
  static SyntheticGame additive(std::vector<double> weights);
  // v(S) = by_size[|S|]; by_size has M + 1 entries.
  static SyntheticGame cardinality(std::vector<double> by_size);

  static SyntheticGame from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t feature_count() const { return feature_count_; }
  Rule rule() const { return rule_; }
  double value(const Coalition& coalition) const;

 private:
  SyntheticGame(std::size_t feature_count, Rule rule)
      : feature_count_(feature_count), rule_(rule) {}

  std::size_t feature_count_;
  Rule rule_;
  std::unordered_map<std::uint64_t, double> table_;
  std::vector<double> params_;
};

double game_value(const SyntheticGame& game, const Coalition& coalition);

// f_x(z'): maps a coalition to the explained output.
class ValueFunction {
 public:
  virtual ~ValueFunction() = default;
  virtual std::size_t feature_count() const = 0;
  virtual Task task() const = 0;
  virtual std::vector<double> evaluate_batch(
      std::span<const Coalition> coalitions) const = 0;

  double evaluate(const Coalition& coalition) const {
    return evaluate_batch(std::span(&coalition, 1)).front();
  }
};

// Marginal expectation by background substitution: present features take the
// instance's values, absent ones each background row's values, and the model
// outputs are averaged over the background.
class MarginalValueFunction final : public ValueFunction {
 public:
  MarginalValueFunction(std::shared_ptr<const Model> model, Instance x,
                        std::shared_ptr<const BackgroundSet> background,
                        std::size_t max_rows_per_call = 1 << 16);

  std::size_t feature_count() const override { return x_.size(); }
  Task task() const override { return model_->task(); }
  std::vector<double> evaluate_batch(
      std::span<const Coalition> coalitions) const override;

  const Instance& instance() const { return x_; }

 private:
  std::shared_ptr<const Model> model_;
  Instance x_;
  std::shared_ptr<const BackgroundSet> background_;
  std::size_t max_rows_per_call_;
};

// Plays a synthetic game directly; no background involved.
class GameValueFunction final : public ValueFunction {
 public:
  explicit GameValueFunction(SyntheticGame game) : game_(std::move(game)) {}

  std::size_t feature_count() const override { return game_.feature_count(); }
  Task task() const override { return Task::regression; }
  std::vector<double> evaluate_batch(
      std::span<const Coalition> coalitions) const override;

  const SyntheticGame& game() const { return game_; }

 private:
  SyntheticGame game_;
};

// Forwards to another value function and counts coalition evaluations.
class CountingValueFunction final : public ValueFunction {
 public:
  explicit CountingValueFunction(const ValueFunction& inner) : inner_(inner) {}

  std::size_t feature_count() const override { return inner_.feature_count(); }
  Task task() const override { return inner_.task(); }
  std::vector<double> evaluate_batch(
      std::span<const Coalition> coalitions) const override;

  std::uint64_t evaluations() const { return evaluations_.load(); }
  std::uint64_t batches() const { return batches_.load(); }
  void reset() {
    evaluations_ = 0;
    batches_ = 0;
  }

 private:
  const ValueFunction& inner_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
  mutable std::atomic<std::uint64_t> batches_{0};
};

}  // namespace stshap
