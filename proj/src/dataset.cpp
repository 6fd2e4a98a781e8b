#include "stshap/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "stshap/errors.hpp"
#include "stshap/random.hpp"

namespace stshap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::vector<std::string>& features,
                 const std::string& target,
                 const std::map<std::string, CategoryCodes>& categorical) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open dataset");

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ":1: missing header row");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError(path + ":1: column \"" + name + "\" not found in header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  Dataset data;
  data.target_name = target;
  const std::size_t target_col = column(target);
  if (features.empty()) {
    for (const auto& h : header) {
      if (h != target) data.feature_names.push_back(h);
    }
  } else {
    data.feature_names = features;
  }
  std::vector<std::size_t> feature_cols;
  for (const auto& f : data.feature_names) {
    if (f == target) throw ConfigError("target \"" + target + "\" is also listed as a feature");
    feature_cols.push_back(column(f));
  }
  for (const auto& [name, codes] : categorical) column(name);
  if (feature_cols.size() < 2) throw ConfigError("at least two features are required");

  auto parse_cell = [&](const std::string& raw, std::size_t col, std::size_t line_no) {
    const std::string cell = trim(raw);
    const auto cat = categorical.find(header[col]);
    if (cat != categorical.end()) {
      const auto code = cat->second.find(cell);
      if (code == cat->second.end()) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": value \"" + cell +
                          "\" of column \"" + header[col] + "\" has no declared code");
      }
      return static_cast<double>(code->second);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
        !std::isfinite(v)) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": column \"" +
                        header[col] + "\": \"" + cell + "\" is not a number");
    }
    return v;
  };

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (auto col : feature_cols) row.push_back(parse_cell(cells[col], col, line_no));
    data.y.push_back(parse_cell(cells[target_col], target_col, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": no data rows");

  data.x.resize(rows.size(), feature_cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < feature_cols.size(); ++c) data.x(r, c) = rows[r][c];
  }
  return data;
}

Split split_rows(std::size_t rows, double test_fraction, std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0) {
    throw ConfigError("test fraction must be in [0, 1)");
  }
  if (test_fraction > 0.0 && rows < 2) {
    throw ConfigError("a train/test split needs at least two rows");
  }
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed);
  for (std::size_t i = rows; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * rows));
  if (test_fraction > 0.0) n_test = std::clamp<std::size_t>(n_test, 1, rows - 1);
  Split split;
  split.train.assign(order.begin(), order.end() - n_test);
  split.test.assign(order.end() - n_test, order.end());
  return split;
}

RowMatrix select_rows(const RowMatrix& x, const std::vector<std::size_t>& rows) {
  RowMatrix out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = x.row(rows[i]);
  return out;
}

}  // namespace stshap
