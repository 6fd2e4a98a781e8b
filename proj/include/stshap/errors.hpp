#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stshap {

// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The black-box model failed or replied with malformed output (exit code 3).
class ModelError : public std::runtime_error {
 public:
  ModelError(std::size_t batch_index, const std::string& what)
      : std::runtime_error("model batch " + std::to_string(batch_index) +
                           ": " + what),
        batch_index_(batch_index) {}

  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

// The exact oracle refuses feature counts over its cap (exit code 4).
class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The surrogate's normal equations stayed singular after ridge jitter.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stshap
