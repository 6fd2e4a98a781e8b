#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "stshap/value_function.hpp"

namespace stshap {

// Declared integer codes for a categorical column, e.g. {"red": 0, "blue": 1}.
using CategoryCodes = std::map<std::string, int>;

struct Dataset {
  std::vector<std::string> feature_names;
  std::string target_name;
  RowMatrix x;
  std::vector<double> y;

  std::size_t rows() const { return y.size(); }
  std::size_t feature_count() const { return feature_names.size(); }
};

// Reads a CSV whose first row holds the column names. Every cell of a used
// column must parse as a number unless the column has declared codes. An
// empty `features` list means every column except the target. Errors are
// ConfigError with "file:line" context.
Dataset load_csv(const std::string& path, const std::vector<std::string>& features,
                 const std::string& target,
                 const std::map<std::string, CategoryCodes>& categorical = {});

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle of [0, rows) cut into train and test parts.
Split split_rows(std::size_t rows, double test_fraction, std::uint64_t seed);

RowMatrix select_rows(const RowMatrix& x, const std::vector<std::size_t>& rows);

}  // namespace stshap
